"""Flat key=value run configuration.

One binding per line, '#' starts a comment, unknown keys are rejected so a
typo never silently changes a run.  Numeric tokens accept 'pi' and '2pi';
multi-axis values are separated by 'x' or ','.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, HeatLabError
from .fields import _parse_number, parse_field_text
from .geometry import GeometrySpec
from .solver import Problem, Schedule

KNOWN_KEYS = frozenset({
    "geometry.kind", "geometry.resolution", "geometry.extent", "geometry.boundary",
    "problem.kind", "problem.a", "problem.phi",
    "initial",
    "schedule.scheme", "schedule.dt", "schedule.t_end", "schedule.stride",
    "check.tag", "check.tol",
    "sweep.a", "sweep.sup", "sweep.seeds",
    "output.dir",
})

CHECK_TAGS = ("drift", "classic", "nonlinear")


@dataclass(frozen=True)
class RunConfig:
    """Parsed, typed view of a run configuration file."""

    pairs: dict

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        pairs = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError("line %d: expected key = value" % lineno)
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in KNOWN_KEYS:
                raise ConfigError("line %d: unknown key '%s'" % (lineno, key))
            if key in pairs:
                raise ConfigError("line %d: duplicate key '%s'" % (lineno, key))
            if not value:
                raise ConfigError("line %d: empty value for '%s'" % (lineno, key))
            pairs[key] = value
        return cls(pairs)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return cls.parse(fh.read())
        except OSError as exc:
            raise ConfigError("cannot read config '%s': %s" % (path, exc))

    # -- accessors ----------------------------------------------------------

    def _require(self, key: str) -> str:
        if key not in self.pairs:
            raise ConfigError("missing required key '%s'" % key)
        return self.pairs[key]

    def _number(self, key: str, default=None) -> float:
        if key not in self.pairs:
            if default is None:
                raise ConfigError("missing required key '%s'" % key)
            return default
        try:
            return _parse_number(self.pairs[key])
        except ValueError:
            raise ConfigError("key '%s': bad number '%s'" % (key, self.pairs[key]))

    def _number_list(self, key: str):
        raw = self._require(key)
        toks = [t for t in raw.replace("x", ",").split(",") if t.strip()]
        try:
            return tuple(_parse_number(t) for t in toks)
        except ValueError:
            raise ConfigError("key '%s': bad numeric list '%s'" % (key, raw))

    def geometry_spec(self, resolution_override=None) -> GeometrySpec:
        kind = self._require("geometry.kind")
        raw_res = self._number_list("geometry.resolution")
        if any(v != int(v) for v in raw_res):
            raise ConfigError("geometry.resolution must be integer")
        res = tuple(int(v) for v in raw_res)
        ext = self._number_list("geometry.extent")
        if resolution_override is not None:
            res = (int(resolution_override),) * len(res)
        try:
            return GeometrySpec(kind, res, ext, self.pairs.get("geometry.boundary", ""))
        except HeatLabError as exc:
            raise ConfigError(str(exc))

    def problem(self, manifold) -> Problem:
        kind = self._require("problem.kind")
        if kind not in ("drifting", "lognonlinear"):
            raise ConfigError("problem.kind must be drifting or lognonlinear")
        try:
            initial = parse_field_text(manifold, self._require("initial"))
            if kind == "drifting":
                phi = parse_field_text(manifold, self.pairs.get("problem.phi", "const 0"))
                return Problem.drifting(manifold, phi, initial)
            a = self._number("problem.a")
            return Problem.lognonlinear(manifold, a, initial)
        except HeatLabError as exc:
            raise ConfigError(str(exc))

    def schedule(self) -> Schedule:
        scheme = self.pairs.get("schedule.scheme", "implicit_euler")
        dt = self.pairs.get("schedule.dt", "auto")
        if dt != "auto":
            try:
                dt = _parse_number(dt)
            except ValueError:
                raise ConfigError("schedule.dt must be a number or 'auto'")
        t_end = self._number("schedule.t_end")
        stride = int(self._number("schedule.stride", 1.0))
        try:
            return Schedule(t_end=t_end, dt=dt, stride=stride, scheme=scheme)
        except HeatLabError as exc:
            raise ConfigError(str(exc))

    def check_tag(self) -> str:
        tag = self._require("check.tag")
        if tag not in CHECK_TAGS:
            raise ConfigError("check.tag must be one of %s" % (CHECK_TAGS,))
        return tag

    def check_tol(self):
        raw = self.pairs.get("check.tol", "auto")
        if raw == "auto":
            return "auto"
        try:
            tol = _parse_number(raw)
        except ValueError:
            raise ConfigError("check.tol must be a number or 'auto'")
        if tol < 0:
            raise ConfigError("check.tol must be nonnegative")
        return tol

    def sweep_values(self):
        a_values = self._number_list("sweep.a")
        sup_values = self._number_list("sweep.sup")
        raw = self._require("sweep.seeds")
        toks = [t for t in raw.replace("x", ",").split(",") if t.strip()]
        try:
            nums = [int(float(t)) for t in toks]
        except ValueError:
            raise ConfigError("sweep.seeds must be a count or a seed list")
        seeds = tuple(range(nums[0])) if len(nums) == 1 else tuple(nums)
        if not seeds:
            raise ConfigError("sweep.seeds is empty")
        return a_values, sup_values, seeds

    def output_dir(self) -> str:
        return self.pairs.get("output.dir", "out")
