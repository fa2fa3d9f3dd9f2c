"""Exception and warning types shared across the package.

Hierarchy
---------
* ``ConfigError`` (a ``ValueError``): anything wrong with user-supplied
  configuration text or values, refined into :class:`UnknownKeyError`,
  :class:`MalformedValueError` and :class:`ConstraintError` so the CLI can
  report the failure class precisely.
* ``PhysicsError`` (a ``RuntimeError``): a computation that is configured
  legally but lands in a physically meaningless regime (e.g. heralding on a
  mode with vanishing overlap), refined into :class:`NoFringeError` for the
  fringe-period estimator.
* ``AliasingWarning``: a propagation step whose quadratic phase is not
  resolved by the grid; results are suspect but computation continues.
"""

from __future__ import annotations


class AliasingWarning(UserWarning):
    """Sampled phase of a propagation kernel exceeds the Nyquist limit."""


class ConfigError(ValueError):
    """Base class for configuration problems (CLI exit code 2)."""


class UnknownKeyError(ConfigError):
    """A configuration key that the schema does not define."""


class MalformedValueError(ConfigError):
    """A configuration value that cannot be parsed into its declared type."""


class ConstraintError(ConfigError):
    """A parsed configuration value that violates a documented constraint."""


class PhysicsError(RuntimeError):
    """A well-formed computation entered a physically meaningless regime
    (CLI exit code 3)."""


class NoFringeError(PhysicsError):
    """The fringe-period estimator found no significant oscillatory peak."""
