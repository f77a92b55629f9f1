"""Command-line front end.

Subcommands: dualize, chsh, sign-report, sample, sweep. Output goes to
``--output`` (default stdout) as JSON or CSV. On failure a single JSON line
``{"error": ..., "message": ...}`` is written to stderr and the process exits
with the error's code:

    0 ok, 2 ConfigError, 3 InvalidState, 10 ZeroState, 11 ExclusionViolation,
    12 StatisticsMismatch, 13 NotEprForm, 14 SpeciesSuperpositionForbidden,
    15 SettingsNotInPlane, 16 InsufficientShots, 17 OracleDisagreement
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import bell, decoherence, dual, optics
from .errors import ConfigError, DualismError
from .fock import Statistics, TwoParticleState, VariableSpec, build_epr_state, photonic_spec

COMMANDS = ("dualize", "chsh", "sign-report", "sample", "sweep")
_R = 1 / math.sqrt(2.0)
PRESETS = {"bell": (_R, 0.0, _R, 0.0), "product": (1.0, 0.0, 0.0, 0.0)}


@dataclass
class RunConfig:
    command: str
    alpha_re: float = _R
    alpha_im: float = 0.0
    beta_re: float = _R
    beta_im: float = 0.0
    statistics: str = "boson"
    form: str = "A"
    settings: str = "canonical"
    shots: int = 100_000
    seed: int = 0
    gammas: list[float] = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    phi_env: float = 0.0
    routing: str = "caption"
    efficiency: float = 1.0
    nip: bool = False
    format: str = "json"
    output: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.statistics not in ("boson", "fermion"):
            raise ConfigError(f"statistics must be boson or fermion, got {self.statistics!r}")
        if self.form not in ("A", "B"):
            raise ConfigError(f"form must be A or B, got {self.form!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        if self.routing not in ("caption", "main-text"):
            raise ConfigError(f"routing must be caption or main-text, got {self.routing!r}")
        if self.shots < 1:
            raise ConfigError("shots must be positive")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ConfigError("efficiency must lie in [0, 1]")
        if any(not 0.0 <= g <= 1.0 for g in self.gammas):
            raise ConfigError("gammas must lie in [0, 1]")
        parse_settings(self.settings)

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_re, self.alpha_im)

    @property
    def beta(self) -> complex:
        return complex(self.beta_re, self.beta_im)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def parse_settings(text: str) -> bell.BellSettings | str:
    """'canonical', 'optimal', or eight comma-separated angles in degrees."""
    if text == "canonical":
        return bell.BellSettings.canonical()
    if text == "optimal":
        return "optimal"
    try:
        angles = [float(x) for x in text.split(",")]
        return bell.BellSettings.from_degrees(angles)
    except ValueError:
        raise ConfigError(f"bad settings {text!r}") from None


def parse_range(text: str) -> list[float]:
    """'start:stop:step' (inclusive) or a comma list."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            n = int(round((stop - start) / step)) + 1
            return [round(start + k * step, 12) for k in range(n)]
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"bad range {text!r}") from None


def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"bad complex number {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dualism", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("--state", choices=sorted(PRESETS), help="amplitude preset")
    p.add_argument("--alpha", type=_complex_arg, help="e.g. 0.6 or 0.8j or 0.3+0.4j")
    p.add_argument("--beta", type=_complex_arg)
    p.add_argument("--stats", dest="statistics", choices=("boson", "fermion"))
    p.add_argument("--form", choices=("A", "B"), help="labeled form for chsh")
    p.add_argument("--settings", help="canonical | optimal | 8 comma-separated degrees")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--gammas", type=parse_range, help="start:stop:step or comma list")
    p.add_argument("--times", type=parse_range, help="times mapped to gamma = exp(-t/tau)")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--phi-env", dest="phi_env", type=float, help="overlap phase, degrees")
    p.add_argument("--routing", choices=("caption", "main-text"))
    p.add_argument("--efficiency", type=float)
    p.add_argument("--nip", action="store_true", default=None,
                   help="dualize a two-species state instead")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("-o", "--output")
    return p


def config_from_args(argv: Sequence[str]) -> RunConfig:
    args = build_parser().parse_args(argv)
    base: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    base["command"] = args.command
    if args.state:
        base["alpha_re"], base["alpha_im"], base["beta_re"], base["beta_im"] = PRESETS[args.state]
    if args.alpha is not None:
        base["alpha_re"], base["alpha_im"] = args.alpha.real, args.alpha.imag
    if args.beta is not None:
        base["beta_re"], base["beta_im"] = args.beta.real, args.beta.imag
    if args.times is not None:
        if args.tau <= 0:
            raise ConfigError("tau must be positive")
        base["gammas"] = [math.exp(-t / args.tau) for t in args.times]
    if args.phi_env is not None:
        base["phi_env"] = math.radians(args.phi_env)
    for name in ("statistics", "form", "settings", "shots", "seed", "gammas",
                 "routing", "efficiency", "nip", "format", "output"):
        value = getattr(args, name)
        if value is not None:
            base[name] = value
    return RunConfig.from_dict(base)


# --- pipelines ----------------------------------------------------------------


def _state(cfg: RunConfig, spec: VariableSpec | None = None) -> TwoParticleState:
    return build_epr_state(cfg.alpha, cfg.beta, Statistics.parse(cfg.statistics), spec)


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    fmt = lambda v: repr(v) if isinstance(v, float) else str(v)
    lines = [",".join(header)] + [",".join(fmt(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def _labeled_row(name: str, lb: dual.LabeledBipartiteState) -> list:
    return [name, lb.label_variable, lb.entangled_variable,
            lb.c1.real, lb.c1.imag, lb.c2.real, lb.c2.imag, lb.concurrence()]


def run_dualize(cfg: RunConfig) -> tuple[dict, str]:
    if cfg.nip:
        s = dual.nip_epr_state(cfg.alpha, cfg.beta)
        a = dual.relabel_nip_by_A(s)
        b = dual.attempt_relabel_by_B_nip(s)
        obj = {"nip": True, "a_form": a.to_dict(), "b_form": b.to_dict()}
    else:
        s = _state(cfg)
        a, b = dual.relabel_by_A(s), dual.relabel_by_B(s)
        obj = {
            "state": s.to_dict(),
            "a_form": a.to_dict(),
            "b_form": b.to_dict(),
            "concurrence": {"A": a.concurrence(), "B": b.concurrence()},
        }
    header = ["form", "label_variable", "entangled_variable",
              "c1_re", "c1_im", "c2_re", "c2_im", "concurrence"]
    return obj, _csv(header, [_labeled_row("A", a), _labeled_row("B", b)])


def _chsh_rows(res: bell.ChshResult) -> list[list]:
    rows = [[n, e] for n, e in zip(bell.PAIR_NAMES, res.correlators)]
    rows.append(["S", res.bell_expectation])
    return rows


def run_chsh(cfg: RunConfig) -> tuple[dict, str]:
    s = _state(cfg)
    lb = dual.relabel_by_A(s) if cfg.form == "A" else dual.relabel_by_B(s)
    settings = parse_settings(cfg.settings)
    obj: dict = {"form": cfg.form, "state": lb.to_dict()}
    if settings == "optimal":
        opt = bell.chsh_optimal(lb)
        obj["optimal"] = opt.to_dict()
        res = bell.bell_expectation(lb, opt.settings)
    else:
        res = bell.bell_expectation(lb, settings)
    obj["result"] = res.to_dict()
    return obj, _csv(["quantity", "value"], _chsh_rows(res))


def run_sign_report(cfg: RunConfig) -> tuple[dict, str]:
    settings = parse_settings(cfg.settings)
    if settings == "optimal":
        raise ConfigError("sign-report needs fixed in-plane settings, not 'optimal'")
    rep = bell.sign_difference_report(_state(cfg), settings)
    obj = {"statistics": cfg.statistics, **rep.to_dict()}
    return obj, _csv(["S_A", "S_B", "ratio_sign"], [[rep.s_a, rep.s_b, rep.ratio_sign]])


def run_sample(cfg: RunConfig) -> tuple[dict, str]:
    s = _state(cfg, photonic_spec())
    routed = optics.route_through_pbs(s, optics.RoutingConvention.parse(cfg.routing))
    settings = parse_settings(cfg.settings)
    if settings == "optimal":
        settings = bell.chsh_optimal(routed).settings
    rec = optics.sample_coincidences(routed, settings, cfg.shots, cfg.seed, cfg.efficiency)
    s_hat, stderr = optics.estimate_chsh(rec)
    exact = bell.bell_expectation(routed, settings).bell_expectation
    obj = {
        "routed_state": {**routed.to_dict(), "parties": list(routed.slot_tags)},
        "record": rec.to_dict(),
        "estimate": {"S_hat": s_hat, "stderr": stderr, "S_exact": exact},
    }
    return obj, rec.to_csv()


def run_sweep(cfg: RunConfig) -> tuple[dict, str]:
    mode = "optimal" if cfg.settings == "optimal" else "fixed-canonical"
    if cfg.settings not in ("optimal", "canonical"):
        raise ConfigError("sweep supports --settings canonical or optimal")
    rows = decoherence.sweep_transition(_state(cfg), cfg.gammas, mode, cfg.phi_env)
    return {"rows": decoherence.sweep_to_json_obj(rows)}, decoherence.sweep_to_csv(rows)


PIPELINES = {
    "dualize": run_dualize,
    "chsh": run_chsh,
    "sign-report": run_sign_report,
    "sample": run_sample,
    "sweep": run_sweep,
}


def _default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o).__name__)


def run(cfg: RunConfig) -> str:
    """Execute ``cfg`` and return the rendered output text."""
    obj, csv_text = PIPELINES[cfg.command](cfg)
    if cfg.format == "csv":
        return csv_text
    echoed = {k: v for k, v in cfg.to_dict().items() if k != "output"}
    return json.dumps({"command": cfg.command, "config": echoed, **obj},
                      indent=2, sort_keys=True, default=_default) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
        text = run(cfg)
        if cfg.output:
            with open(cfg.output, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except DualismError as exc:
        sys.stderr.write(json.dumps(exc.to_dict(), sort_keys=True, default=str) + "\n")
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
