# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
Functions and `dsp` model to model the incremental least-squares regression.

The pipeline reads (or generates) a tabular dataset, splits it 80/20, fits the
preprocessor on the train rows only (z-score numeric columns, one-hot
categorical columns), then trains a linear model or a ReLU network one sample
at a time, recording the train/test errors every `eval_every` steps.
"""
import logging
import collections
import numpy as np
import pandas as pd
import schedula as sh
from ...defaults import dfl
from ...utils import seeded_rng, CurvePoint
from ...errors import (
    EmptyInput, ParseError, MissingColumn, Diverged, DimensionMismatch
)
from .approximator import (
    LinearModel, MLP, layer_specs, eval_with_gradient
)
from .optim import OptimConfig, OptimState, step, xi_within_bounds

log = logging.getLogger(__name__)

dsp = sh.BlueDispatcher(
    name='supervised', raises=True,
    description='Models the incremental least-squares regression pipeline.'
)


class Dataset:
    """
    Regression samples.

    :param features:
        Raw feature columns.
    :type features: pandas.DataFrame

    :param targets:
        Target values.
    :type targets: numpy.array

    :param column_meta:
        Kind per column: `'numeric'` or `('categorical', cardinality)`.
    :type column_meta: dict
    """

    def __init__(self, features, targets, column_meta, target_column='target'):
        targets = np.asarray(targets, dtype=float)
        if len(features) != targets.size:
            raise DimensionMismatch(
                'Features have %d rows, targets %d!' % (
                    len(features), targets.size
                )
            )
        self.features, self.targets = features, targets
        self.column_meta, self.target_column = column_meta, target_column

    def __len__(self):
        return self.targets.size

    @property
    def numeric_columns(self):
        return [k for k, v in self.column_meta.items() if v == 'numeric']

    @property
    def categorical_columns(self):
        return [k for k, v in self.column_meta.items() if v != 'numeric']

    def subset(self, index):
        return Dataset(
            self.features.iloc[index].reset_index(drop=True),
            self.targets[index], self.column_meta, self.target_column
        )


#: Train/test partition parameters.
SplitSpec = collections.namedtuple(
    'SplitSpec', ['train_fraction', 'shuffle_seed']
)

#: Preprocessed train/test arrays and the count of test rows holding an
#: unseen category.
TrainData = collections.namedtuple(
    'TrainData',
    ['x_train', 'y_train', 'x_test', 'y_test', 'unseen_categories'],
    defaults=(0,)
)


def _column_meta(frame, schema):
    meta = {}
    for k, kind in schema.items():
        if kind == 'numeric':
            meta[k] = 'numeric'
        else:
            meta[k] = ('categorical', int(frame[k].nunique()))
    return meta


def _parse_numeric(column, name):
    values = np.empty(len(column))
    for i, v in enumerate(column.values):
        try:
            values[i] = float(v)
        except ValueError:
            raise ParseError(i, name, v)
        if not np.isfinite(values[i]):
            raise ParseError(i, name, v)
    return values


def load_csv(path, schema=None, target_column='target'):
    """
    Reads a dataset from a comma-delimited UTF-8 file with header.

    :param path:
        File path.
    :type path: str

    :param schema:
        Column kinds (`numeric` or `categorical`) of the feature columns. If
        not given, every non-target column is numeric.
    :type schema: dict[str, str], optional

    :param target_column:
        Name of the target column.
    :type target_column: str

    :return:
        Dataset.
    :rtype: Dataset
    """
    frame = pd.read_csv(
        path, dtype=str, keep_default_na=False, encoding='utf-8'
    )
    if schema is None:
        schema = {k: 'numeric' for k in frame.columns if k != target_column}
    for k in list(schema) + [target_column]:
        if k not in frame.columns:
            raise MissingColumn('Column %r is not in %s!' % (k, path))

    for k in [k for k, v in schema.items() if v == 'numeric'] + [
            target_column]:
        frame[k] = _parse_numeric(frame[k], k)

    features = frame[list(schema)]
    return Dataset(
        features, frame[target_column].values, _column_meta(features, schema),
        target_column
    )


def save_csv(path, data):
    """
    Writes a dataset in the format read by :func:`load_csv`.

    :param path:
        File path.
    :type path: str

    :param data:
        Dataset.
    :type data: Dataset
    """
    frame = data.features.copy()
    frame[data.target_column] = data.targets
    frame.to_csv(path, index=False, encoding='utf-8', float_format='%.17g')


def split_dataset(data, split):
    """
    Splits the dataset into disjoint and exhaustive train/test partitions.

    :param data:
        Dataset.
    :type data: Dataset

    :param split:
        Split parameters.
    :type split: SplitSpec

    :return:
        Train and test datasets.
    :rtype: (Dataset, Dataset)
    """
    from sklearn.model_selection import train_test_split
    if not 0 < split.train_fraction < 1:
        raise ValueError('Train fraction must be in (0, 1)!')
    train, test = train_test_split(
        np.arange(len(data)), train_size=split.train_fraction,
        random_state=int(split.shuffle_seed) % 2 ** 32, shuffle=True
    )
    return data.subset(np.sort(train)), data.subset(np.sort(test))


class Preprocessor:
    """
    Column transformer fitted on the train rows only.

    Numeric columns are standardized (population standard deviation),
    categorical columns are one-hot encoded; unseen test categories map to an
    all-zeros block.
    """

    def __init__(self, numeric_columns, categorical_columns):
        from sklearn.compose import ColumnTransformer
        from sklearn.preprocessing import StandardScaler, OneHotEncoder
        self.numeric_columns = list(numeric_columns)
        self.categorical_columns = list(categorical_columns)
        steps = []
        if self.numeric_columns:
            steps.append(('num', StandardScaler(), self.numeric_columns))
        if self.categorical_columns:
            steps.append(('cat', OneHotEncoder(
                handle_unknown='ignore', sparse_output=False
            ), self.categorical_columns))
        self.transformer = ColumnTransformer(steps, sparse_threshold=0)

    def fit(self, frame):
        self.transformer.fit(frame)
        return self

    def transform(self, frame):
        return np.asarray(self.transformer.transform(frame), dtype=float)

    @property
    def means(self):
        return self.transformer.named_transformers_['num'].mean_

    @property
    def scales(self):
        return self.transformer.named_transformers_['num'].scale_

    @property
    def categories(self):
        enc = self.transformer.named_transformers_['cat']
        return {
            k: {c: i for i, c in enumerate(v)}
            for k, v in zip(self.categorical_columns, enc.categories_)
        }

    def count_unseen(self, frame):
        """
        Counts the rows holding a category not seen while fitting.
        """
        if not self.categorical_columns:
            return 0
        mask = np.zeros(len(frame), bool)
        for k, cats in self.categories.items():
            mask |= ~frame[k].isin(list(cats)).values
        return int(mask.sum())


_housing_columns = (
    'MedInc', 'HouseAge', 'AveRooms', 'AveBedrms', 'Population', 'AveOccup',
    'Latitude', 'Longitude'
)
_diamonds_numeric = ('carat', 'depth', 'table', 'x', 'y', 'z')
_diamonds_categorical = {
    'cut': ('Fair', 'Good', 'Very Good', 'Premium', 'Ideal'),
    'color': ('D', 'E', 'F', 'G', 'H', 'I', 'J'),
    'clarity': ('I1', 'SI2', 'SI1', 'VS2', 'VS1', 'VVS2', 'VVS1', 'IF')
}


def make_dataset(name, n_samples, seed):
    """
    Generates a synthetic regression benchmark.

    - `housing`: 8 numeric features, positive target,
    - `diamonds`: 6 numeric and 3 categorical features (5, 7 and 8 levels),
      positive target,
    - `linear`: 8 numeric features, noiseless target `y = aᵀx`.

    :param name:
        Benchmark name.
    :type name: str

    :param n_samples:
        Number of samples.
    :type n_samples: int

    :param seed:
        Random seed.
    :type seed: int

    :return:
        Dataset.
    :rtype: Dataset
    """
    from sklearn.datasets import make_regression
    rng = seeded_rng(seed, 101)
    state = int(rng.integers(2 ** 31))
    if name == 'linear':
        x = rng.standard_normal((n_samples, 8))
        y = x @ rng.standard_normal(8)
        cols = ['x%d' % i for i in range(8)]
        frame = pd.DataFrame(x, columns=cols)
        return Dataset(frame, y, _column_meta(frame, dict.fromkeys(
            cols, 'numeric'
        )))
    if name == 'housing':
        x, y = make_regression(
            n_samples, 8, n_informative=6, noise=5.0, random_state=state
        )
        y = np.exp((y - y.mean()) / (2 * y.std()))
        frame = pd.DataFrame(x, columns=list(_housing_columns))
        schema = dict.fromkeys(_housing_columns, 'numeric')
        return Dataset(frame, y, _column_meta(frame, schema))
    if name == 'diamonds':
        x, y = make_regression(
            n_samples, 6, n_informative=5, noise=5.0, random_state=state
        )
        frame = pd.DataFrame(x, columns=list(_diamonds_numeric))
        z = (y - y.mean()) / y.std()
        schema = dict.fromkeys(_diamonds_numeric, 'numeric')
        for k, levels in _diamonds_categorical.items():
            idx = rng.integers(len(levels), size=n_samples)
            z = z + np.linspace(-0.5, 0.5, len(levels))[idx]
            frame[k] = np.asarray(levels, dtype=object)[idx]
            schema[k] = 'categorical'
        return Dataset(frame, np.exp(z / 2), _column_meta(frame, schema))
    raise ValueError('Unknown synthetic dataset %r!' % name)


def mse(targets, predictions):
    """
    Returns half the mean squared residual.

    :param targets:
        Targets.
    :type targets: numpy.array

    :param predictions:
        Predictions.
    :type predictions: numpy.array

    :rtype: float
    """
    y, f = np.asarray(targets, float), np.asarray(predictions, float)
    if not y.size:
        raise EmptyInput('MSE of no samples!')
    if y.shape != f.shape:
        raise DimensionMismatch('Targets and predictions differ in length!')
    return float(0.5 * np.mean((y - f) ** 2))


def mape(targets, predictions):
    """
    Returns the mean absolute percentage error (as a fraction).

    The denominator is guarded by `max(eps, |y|)`.

    :param targets:
        Targets.
    :type targets: numpy.array

    :param predictions:
        Predictions.
    :type predictions: numpy.array

    :rtype: float
    """
    y, f = np.asarray(targets, float), np.asarray(predictions, float)
    if not y.size:
        raise EmptyInput('MAPE of no samples!')
    if y.shape != f.shape:
        raise DimensionMismatch('Targets and predictions differ in length!')
    den = np.maximum(dfl.functions.mape.eps, np.abs(y))
    return float(np.mean(np.abs(y - f) / den))


def train_incremental(config, model, data, steps, eval_every, rng, w0=None):
    """
    Trains the model one uniformly sampled example at a time.

    :param config:
        Update rule.
    :type config: ignd.core.model.optim.OptimConfig

    :param model:
        Function approximator.
    :type model: ignd.core.model.approximator.LinearModel |
        ignd.core.model.approximator.MLP

    :param data:
        Preprocessed train/test arrays.
    :type data: TrainData

    :param steps:
        Number of updates.
    :type steps: int

    :param eval_every:
        Evaluation period [steps].
    :type eval_every: int

    :param rng:
        Random generator (initialisation and sampling).
    :type rng: numpy.random.Generator

    :param w0:
        Initial weights (default: model initialisation from `rng`).
    :type w0: numpy.array, optional

    :return:
        Records `train_mse`, `test_mse`, `test_mape`, `xi_mean` and
        `grad_sq_max` per evaluation step.
    :rtype: list[CurvePoint]
    """
    x, y = data.x_train, data.y_train
    if not y.size:
        raise EmptyInput('Training set is empty!')
    w = model.init(rng) if w0 is None else np.array(w0, dtype=float)
    state, records = OptimState.new(config, model.n_params), []
    max_w = dfl.functions.train_incremental.max_abs_weight
    xi_sum, xi_n, violations = 0.0, 0, 0
    for t in range(int(steps)):
        i = rng.integers(y.size)
        ev = eval_with_gradient(model, w, x[i], y[i])
        w, diag = step(config, state, w, ev)
        if not np.isfinite(w).all() or np.abs(w).max() > max_w:
            raise Diverged('Weights diverged at step %d!' % (t + 1))
        xi_sum, xi_n = xi_sum + diag.xi, xi_n + 1
        if config.rule == 'ignd' and not xi_within_bounds(
                diag.xi, state, config.epsilon):
            if not violations:
                log.warning('Gauss-Newton scaling out of its bounds at step '
                            '%d (xi = %g).', t + 1, diag.xi)
            violations += 1
        if (t + 1) % eval_every == 0 or t + 1 == steps:
            s = t + 1
            records.append(CurvePoint(s, 'train_mse', mse(
                y, model.predict(w, x)
            )))
            if data.y_test.size:
                f = model.predict(w, data.x_test)
                records.append(CurvePoint(s, 'test_mse', mse(data.y_test, f)))
                records.append(CurvePoint(
                    s, 'test_mape', mape(data.y_test, f)
                ))
            records.append(CurvePoint(s, 'xi_mean', xi_sum / xi_n))
            records.append(CurvePoint(
                s, 'grad_sq_max', float(state.max_grad_sq_seen)
            ))
            xi_sum = xi_n = 0
    if violations:
        records.append(CurvePoint(steps, 'xi_violations', float(violations)))
    return records


@sh.add_function(dsp, outputs=['dataset'])
def load_supervised_dataset(config, seed):
    """
    Loads the dataset named by `supervised.dataset`.

    A path ending with `.csv` is read with :func:`load_csv`, anything else is
    the name of a synthetic benchmark generated from the seed.

    :param config:
        Validated experiment config.
    :type config: dict

    :param seed:
        Run seed.
    :type seed: int

    :return:
        Dataset.
    :rtype: Dataset
    """
    name = config['supervised.dataset']
    if name.lower().endswith('.csv'):
        return load_csv(
            name, config.get('supervised.columns'),
            config['supervised.target']
        )
    return make_dataset(name, config['supervised.n_samples'], seed)


@sh.add_function(dsp, outputs=['train_data'])
def prepare_train_data(config, seed, dataset):
    """
    Splits the dataset and applies the preprocessor fitted on the train rows.

    :param config:
        Validated experiment config.
    :type config: dict

    :param seed:
        Run seed.
    :type seed: int

    :param dataset:
        Dataset.
    :type dataset: Dataset

    :return:
        Preprocessed train/test arrays.
    :rtype: TrainData
    """
    train, test = split_dataset(dataset, SplitSpec(
        config['supervised.train_fraction'],
        int(seeded_rng(seed, 102).integers(2 ** 63))
    ))
    pre = Preprocessor(
        dataset.numeric_columns, dataset.categorical_columns
    ).fit(train.features)
    unseen = pre.count_unseen(test.features)
    if unseen:
        log.warning('%d test rows hold categories unseen while training.',
                    unseen)
    return TrainData(
        pre.transform(train.features), train.targets,
        pre.transform(test.features), test.targets, unseen
    )


@sh.add_function(dsp, outputs=['approximator'])
def define_approximator(config, train_data):
    """
    Defines the function approximator of `supervised.model`.

    :param config:
        Validated experiment config.
    :type config: dict

    :param train_data:
        Preprocessed train/test arrays.
    :type train_data: TrainData

    :return:
        Function approximator.
    :rtype: LinearModel | MLP
    """
    n = train_data.x_train.shape[1]
    if config['supervised.model'] == 'linear':
        return LinearModel(n)
    return MLP(layer_specs(config['supervised.hidden']), n)


@sh.add_function(dsp, outputs=['optim_config'])
def define_optim_config(config):
    """
    Defines the update rule from the `optimizer.*` keys.

    :param config:
        Validated experiment config.
    :type config: dict

    :rtype: ignd.core.model.optim.OptimConfig
    """
    return OptimConfig.from_config(config, horizon=config['steps'])


@sh.add_function(dsp, outputs=['curve'])
def train_supervised(config, seed, optim_config, approximator, train_data):
    """
    Runs the incremental training of one seed.

    :param config:
        Validated experiment config.
    :type config: dict

    :param seed:
        Run seed.
    :type seed: int

    :param optim_config:
        Update rule.
    :type optim_config: ignd.core.model.optim.OptimConfig

    :param approximator:
        Function approximator.
    :type approximator: LinearModel | MLP

    :param train_data:
        Preprocessed train/test arrays.
    :type train_data: TrainData

    :return:
        Learning curve, led by `unseen_categories` when the test rows hold
        categories unseen while training.
    :rtype: list[CurvePoint]
    """
    records = train_incremental(
        optim_config, approximator, train_data, config['steps'],
        config['supervised.eval_every'], seeded_rng(seed, 103)
    )
    if train_data.unseen_categories:
        records.insert(0, CurvePoint(
            0, 'unseen_categories', float(train_data.unseen_categories)
        ))
    return records
