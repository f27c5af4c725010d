# -*- coding: utf-8 -*-
#
# Copyright 2023-2026 igndkit contributors;
# Licensed under the EUPL (the 'Licence');
# You may not use this work except in compliance with the Licence.
# You may obtain a copy of the Licence at: http://ec.europa.eu/idabc/eupl
"""
It contains the exceptions raised by the IGND toolkit.

Every exception derives from :class:`IGNDError` and from the closest builtin,
so callers may catch either.
"""


class IGNDError(Exception):
    """
    Base class of all toolkit errors.
    """


class NonFiniteValue(IGNDError, ValueError):
    """
    Data contains NaN or Inf entries.
    """


class DimensionMismatch(IGNDError, ValueError):
    """
    Vector/matrix dimensions are not consistent.
    """


class LengthMismatch(IGNDError, ValueError):
    """
    A flat weight vector has not the expected length.
    """


class IndexOutOfRange(IGNDError, IndexError):
    """
    A state/action index is outside its domain.
    """


class ZeroScale(IGNDError, ValueError):
    """
    A feature scaling coefficient is zero.
    """


class ZeroGradient(IGNDError, ArithmeticError):
    """
    The residual gradient is identically zero.
    """


class DegenerateScale(IGNDError, ArithmeticError):
    """
    The Gauss-Newton scaling is undefined (``‖∇f‖² + ε = 0``).
    """


class SingularInnerMatrix(IGNDError, ArithmeticError):
    """
    The Riccati inner matrix ``R + γBᵀPB`` cannot be inverted.
    """


class NoConvergence(IGNDError, RuntimeError):
    """
    An iterative procedure exhausted its iterations.
    """


class Diverged(IGNDError, ArithmeticError):
    """
    A training run produced unbounded or non-finite values.
    """


class AllRunsDiverged(Diverged):
    """
    Every cell of a grid search diverged.
    """


class IndefiniteMaa(IGNDError, ArithmeticError):
    """
    The action block of the learned Q-matrix is not definite.
    """


class VerificationFailed(IGNDError, RuntimeError):
    """
    At least one check of the property suite failed.
    """


class SteppedTerminal(IGNDError, RuntimeError):
    """
    An environment was stepped from a terminal state.
    """


class EmptyInput(IGNDError, ValueError):
    """
    A metric received no samples.
    """


class MissingColumn(IGNDError, KeyError):
    """
    A required column is not in the input file.
    """


class ParseError(IGNDError, ValueError):
    """
    A cell of an input file cannot be parsed.

    :param row:
        Zero-based data-row index.
    :type row: int

    :param col:
        Column name.
    :type col: str
    """

    def __init__(self, row, col, value=None):
        self.row, self.col, self.value = row, col, value
        super(ParseError, self).__init__(
            'Cannot parse %r at row %d, column %r!' % (value, row, col)
        )


class ConfigError(IGNDError, ValueError):
    """
    The experiment configuration is not valid.

    :param errors:
        Error messages by dotted field path.
    :type errors: dict[str, str]
    """

    def __init__(self, errors):
        self.errors = dict(errors)
        msg = ['Invalid experiment configuration:']
        msg.extend('%s: %s' % kv for kv in sorted(self.errors.items()))
        super(ConfigError, self).__init__('\n  '.join(msg))


def find_error(ex, *types):
    """
    Finds the first exception of the given types wrapped by `ex`.

    `schedula` re-raises the errors of dispatched functions wrapped into its
    own exception; the original one is reachable through `ex`, `__cause__` or
    `__context__`.

    :param ex:
        Raised exception.
    :type ex: BaseException

    :param types:
        Exception types to look for.
    :type types: type

    :return:
        The matching exception or None.
    :rtype: BaseException | None
    """
    seen, stack = set(), [ex]
    while stack:
        e = stack.pop()
        if not isinstance(e, BaseException) or id(e) in seen:
            continue
        seen.add(id(e))
        if isinstance(e, types):
            return e
        stack.extend((
            getattr(e, 'ex', None), e.__cause__, e.__context__
        ))
    return None
