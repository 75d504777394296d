"""Policy parameters, their ranges, and demographic constants.

The ten policy parameters are the inputs varied by experimental designs.
Everything else the simulation needs (mortality, fertility, partnership
and migration rates) is a demographic constant read from a key = value
configuration file, with calibrated defaults shipped in ``data/``.
"""

from dataclasses import dataclass, fields, InitVar, replace
import importlib.resources

import numpy as np

from .errors import DataError

# name, default, lower, upper
PARAM_TABLE = (
    ("ageingParentsMoveInWithKids", 0.1, 0.1, 0.8),
    ("baseCareProb", 0.0002, 0.0002, 0.0016),
    ("retiredHours", 60.0, 40.0, 80.0),
    ("ageOfRetirement", 65.0, 55.0, 75.0),
    ("personCareProb", 0.0008, 0.0002, 0.0016),
    ("maleAgeCareScaling", 18.0, 10.0, 25.0),
    ("femaleAgeCareScaling", 19.0, 10.0, 25.0),
    ("childHours", 5.0, 1.0, 10.0),
    ("homeAdultHours", 30.0, 5.0, 50.0),
    ("workingAdultHours", 25.0, 5.0, 40.0),
)

PARAM_NAMES = tuple(row[0] for row in PARAM_TABLE)
PARAM_BOUNDS = {row[0]: (row[2], row[3]) for row in PARAM_TABLE}


@dataclass(frozen=True)
class SimParams:
    """The ten policy parameters plus fixed run constants.

    Constructed normally, every policy field must sit inside its
    documented range. ``SimParams.unchecked(...)`` skips the range
    check, which is how degenerate settings (for example a zero care
    probability) are built in tests and experiments.
    """

    ageingParentsMoveInWithKids: float = 0.1
    baseCareProb: float = 0.0002
    retiredHours: float = 60.0
    ageOfRetirement: float = 65.0
    personCareProb: float = 0.0008
    maleAgeCareScaling: float = 18.0
    femaleAgeCareScaling: float = 19.0
    childHours: float = 5.0
    homeAdultHours: float = 30.0
    workingAdultHours: float = 25.0
    # fixed constants, not part of the experimental design
    startYear: int = 1860
    endYear: int = 2050
    initialCouples: int = 375
    hourlyCareCost: float = 15.0
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        if not validate:
            return
        for name, (lo, hi) in PARAM_BOUNDS.items():
            value = getattr(self, name)
            if not np.isfinite(value) or not (lo <= value <= hi):
                raise DataError(
                    "%s=%r outside [%g, %g]; use SimParams.unchecked() "
                    "to build out-of-range settings" % (name, value, lo, hi)
                )
        if self.startYear >= self.endYear:
            raise DataError("startYear must precede endYear")
        if self.initialCouples < 0:
            raise DataError("initialCouples must be >= 0")
        if self.hourlyCareCost < 0:
            raise DataError("hourlyCareCost must be >= 0")

    @classmethod
    def unchecked(cls, **kwargs):
        """Build without the range check (degenerate settings allowed)."""
        return cls(validate=False, **kwargs)

    @classmethod
    def from_vector(cls, values, **fixed):
        """Build from a length-10 vector in canonical parameter order."""
        values = np.asarray(values, dtype=float)
        if values.shape != (len(PARAM_NAMES),):
            raise DataError(
                "expected %d parameter values, got shape %r"
                % (len(PARAM_NAMES), values.shape)
            )
        kwargs = dict(zip(PARAM_NAMES, values.tolist()))
        kwargs.update(fixed)
        return cls(**kwargs)

    def to_vector(self):
        return np.array([getattr(self, n) for n in PARAM_NAMES], dtype=float)

    def with_values(self, **kwargs):
        return replace(self, **kwargs)


def _parse_kv_file(text, path="<string>"):
    """Parse 'key = value' lines; '#' starts a comment; blanks ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError("%s:%d: expected 'key = value'" % (path, lineno))
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


@dataclass(frozen=True)
class Demographics:
    """Fixed demographic constants, independent of the policy parameters.

    Defaults were calibrated so the default policy parameters with seed 0
    keep the 2050 population within a factor of 4 of the 1860 population.
    """

    mortalityBaseMale: float = 6.0e-05
    mortalityBaseFemale: float = 4.5e-05
    mortalityGrowth: float = 0.088
    birthProb: float = 0.14
    partnershipProb: float = 0.3
    divorceProb: float = 0.02
    migrationProb: float = 0.02
    jobLossProb: float = 0.04
    jobFindProb: float = 0.4
    initialEmploymentRate: float = 0.85
    adulthoodAge: int = 17
    fertilityAgeMin: int = 17
    fertilityAgeMax: int = 42
    initialAgeMin: int = 20
    initialAgeMax: int = 59

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value < 0:
                raise DataError("%s must be >= 0" % f.name)
        for name in ("mortalityGrowth", "birthProb", "partnershipProb",
                     "divorceProb", "migrationProb", "jobLossProb",
                     "jobFindProb", "initialEmploymentRate"):
            if getattr(self, name) > 1:
                raise DataError("%s is a probability and must be <= 1" % name)
        if self.fertilityAgeMin > self.fertilityAgeMax:
            raise DataError("fertility age window is empty")
        if self.initialAgeMin > self.initialAgeMax:
            raise DataError("initial age window is empty")

    @classmethod
    def from_text(cls, text, path="<string>"):
        pairs = _parse_kv_file(text, path)
        valid = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, value in pairs.items():
            if key not in valid:
                raise DataError("%s: unknown demographic constant %r" % (path, key))
            caster = int if valid[key] in (int, "int") else float
            try:
                kwargs[key] = caster(value)
            except ValueError:
                raise DataError("%s: bad value %r for %s" % (path, value, key))
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read(), path=str(path))

    @classmethod
    def default(cls):
        text = (
            importlib.resources.files("abmemu.data")
            .joinpath("demographics.cfg")
            .read_text(encoding="utf-8")
        )
        return cls.from_text(text, path="abmemu/data/demographics.cfg")
