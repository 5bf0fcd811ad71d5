"""Exception hierarchy shared by the model, observation and search layers."""

from __future__ import annotations


class ModelError(Exception):
    """Base class for every error raised on a malformed or misused model."""


class UnknownState(ModelError, KeyError):
    pass


class UnknownProperty(ModelError, KeyError):
    pass


class UnknownTest(ModelError, KeyError):
    pass


class PartialTest(ModelError):
    """A test has no outcome recorded for some state."""


class EmptySpace(ModelError):
    pass


class InconsistentEquivalenceClass(ModelError):
    """Representatives of one property disagree on their certain-yes sets,
    or mix classical and non-classical tests."""


class NotClassical(ModelError):
    pass


class NotClassicalFocus(NotClassical):
    pass


class PartialRelation(ModelError):
    """An outcome relation misses some (observed, observer) pair."""


class NonSurjective(ModelError):
    """The outcome relation never yields `yes`, or never yields `no`."""


class PartialAlpha(ModelError):
    pass


class EmptyLambda(ModelError):
    pass


class PremiseViolated(ModelError):
    """The hypotheses of a theorem do not hold for the given model."""


class BoundsTooLarge(ModelError):
    pass


class InvalidSeed(ModelError):
    pass
