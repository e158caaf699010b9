"""Verification checks, the standard graph suite, and size sweeps."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .adversary import solve_meeting, verify_meeteq, tied_configurations
from .errors import MeetlabError
from .graph import Graph, generate
from .hidden import (
    eht_relation, find_hidden, intermediate_below_original_violations,
    phi_atomic_matrix, phi_averaging_residual, phi_tilde_matrix, theorem1_matrix,
    totality_violations, transitivity_violations,
)
from .hitting import (
    averaging_residual, embedding_residual, ext_hitting_formula, ext_hitting_oracle,
    hitting_times, residual_tol, splitting_residual, triangle_residual_extended,
    triangle_residual_original,
)
from .simulate import (
    alternating_scheduler, avoid_original_scheduler, original_meeting_events,
)
from .states import StateSpace

log = logging.getLogger(__name__)

BOUND_TOL = 1e-6
MAX_CONFIGS = 2_000_000


def suite_graphs() -> list[tuple[str, Graph]]:
    """The fixed acceptance suite: small members of every generator family."""
    out = []
    for n in range(3, 13):
        out.append((f"path-{n}", generate("path", n)))
    for n in range(3, 13):
        out.append((f"cycle-{n}", generate("cycle", n)))
    for n in range(3, 9):
        out.append((f"complete-{n}", generate("complete", n)))
    for n in range(4, 9):
        out.append((f"star-{n}", generate("star", n)))
    for n, k in ((6, 3), (8, 4), (10, 5)):
        out.append((f"lollipop-{n}-{k}", generate("lollipop", n, k=k)))
    for i, n in enumerate(range(4, 9), start=1):
        out.append((f"random-{n}-s{i}", generate("random_connected", n, seed=i)))
    return out


@dataclass
class Check:
    name: str
    result: str          # the mathematical statement being checked
    graph: str
    worst: float | None  # worst residual / violation magnitude
    violations: int
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        worst = "-" if self.worst is None else f"{self.worst:.3e}"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"[{status}] {self.graph:<18} {self.name:<34} worst={worst:<10} viol={self.violations}{extra}"


@dataclass
class VerifyReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> None:
        self.checks.append(check)

    def mapping(self) -> dict[str, str]:
        return {c.name: c.result for c in self.checks}

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [c.__dict__ for c in self.checks],
            "mapping": self.mapping(),
        }


@dataclass
class VerifyOptions:
    tol: float = 1e-9
    bound_tol: float = BOUND_TOL
    triangle_samples: int = 10_000
    seed: int = 0
    sim_trials: int = 200
    sim_rounds: int = 10_000
    max_configs: int = MAX_CONFIGS


RESULTS = {
    "ext-hitting formula = oracle": "closed-form extended hitting times (neighbor-edge formula)",
    "ext-hitting averaging": "one-step averaging of extended hitting times",
    "ext-hitting = 2x hitting": "extended hitting time between vertices is twice the plain one",
    "ext-hitting splitting": "route-through-tail decomposition of extended hitting times",
    "triangle (vertices)": "cyclic triangle identity for hitting times",
    "triangle (states)": "barred triangle identity for extended hitting times",
    "hidden state exists": "EHT order has a minimum, and it includes an intermediate state",
    "EHT transitivity": "transitivity of the EHT order",
    "EHT totality": "any two states are EHT-comparable",
    "edge state below its head": "w>v <=EHT v for every edge",
    "potential symmetry": "Phi~(x,y) = Phi~(y,x)",
    "potential nonnegative": "Phi~ >= 0",
    "potential averaging": "one-step averaging of Phi~ off the meeting set",
    "meeting averaging": "optimal values satisfy the moved agent's averaging equation",
    "meeting symmetry": "M~(a,b) = M~(b,a)",
    "meeting <= potential": "adversarial non-atomic meeting time is bounded by Phi~ for every hidden state",
    "atomic meeting <= potential": "adversarial atomic meeting time bounded by H(x,y)+H(y,z)-H(z,y)",
    "closed-form bound = potential": "closed-form vertex bound equals Phi~ on vertex pairs",
    "no meeting at vertices (avoid)": "a scheduler can prevent vertex-only meetings",
    "no meeting at vertices (2-fair)": "a 2-fair alternating scheduler also prevents them",
}


def _run(report: VerifyReport, name: str, graph: str, fn: Callable[[], tuple]):
    """Record a check; ``fn`` returns (worst, violations, passed[, detail])."""
    try:
        out = fn()
        worst, viol, ok = out[:3]
        detail = out[3] if len(out) > 3 else ""
        report.add(Check(name, RESULTS[name], graph, worst, int(viol), bool(ok), detail))
    except (MeetlabError, ArithmeticError, ValueError) as exc:
        report.add(Check(name, RESULTS[name], graph, None, 1, False, f"error: {exc}"))


def verify_graph(g: Graph, name: str = "graph", opts: VerifyOptions | None = None,
                 report: VerifyReport | None = None) -> VerifyReport:
    """Run every check on one graph, in dependency order."""
    opts = opts or VerifyOptions()
    report = report if report is not None else VerifyReport()
    ss = StateSpace(g)
    h = hitting_times(g)
    eh = ext_hitting_formula(ss, h)
    tol = max(opts.tol, residual_tol(float(eh.values.max())))
    N = ss.size

    def oracle():
        d = float(np.abs(eh.values - ext_hitting_oracle(ss).values).max())
        return d, int(d > tol), d <= tol
    _run(report, "ext-hitting formula = oracle", name, oracle)
    _run(report, "ext-hitting averaging", name,
         lambda: (r := averaging_residual(eh), int(r > tol), r <= tol))
    _run(report, "ext-hitting = 2x hitting", name,
         lambda: (r := embedding_residual(eh, h), int(r > tol), r <= tol))
    _run(report, "ext-hitting splitting", name,
         lambda: (r := splitting_residual(eh), int(r > tol), r <= tol))
    _run(report, "triangle (vertices)", name,
         lambda: (r := triangle_residual_original(h), int(r > tol), r <= tol, f"{g.n ** 3} triples"))

    def tri_ext():
        r, k = triangle_residual_extended(eh, opts.triangle_samples, opts.seed)
        return r, int(r > tol), r <= tol, f"{k} triples"
    _run(report, "triangle (states)", name, tri_ext)

    R = eht_relation(eh)
    rep = None
    try:
        rep = find_hidden(eh, ss, h)
    except MeetlabError:
        pass

    def hidden_ok():
        if rep is None:
            return None, 1, False, "find_hidden raised"
        inter = [i for i in rep.hidden_states if ss.is_intermediate(i)]
        return 0.0, 0, bool(inter), f"{len(rep.hidden_states)} hidden, using {ss.label(rep.chosen_hidden)}"
    _run(report, "hidden state exists", name, hidden_ok)

    def trans():
        v, k = transitivity_violations(R, opts.triangle_samples, opts.seed)
        return float(v), v, v == 0, f"{k} triples"
    _run(report, "EHT transitivity", name, trans)
    _run(report, "EHT totality", name,
         lambda: (float(v := totality_violations(R)), v, v == 0))
    _run(report, "edge state below its head", name,
         lambda: (float(v := intermediate_below_original_violations(eh)), v, v == 0))
    if rep is None:
        return report

    phi = phi_tilde_matrix(eh, rep.chosen_hidden)

    def sym():
        d = float(np.abs(phi - phi.T).max())
        return d, int(d > tol), d <= tol
    _run(report, "potential symmetry", name, sym)

    def nonneg():
        lo = float(phi.min())
        return max(0.0, -lo), int((phi < -tol).sum()), lo >= -tol, f"min {lo:.6g}"
    _run(report, "potential nonnegative", name, nonneg)
    _run(report, "potential averaging", name,
         lambda: (r := phi_averaging_residual(eh, phi), int(r > tol), r <= tol))

    n = g.n
    t, u = ss.states[rep.chosen_hidden].x, ss.states[rep.chosen_hidden].y

    def thm1():
        d = float(np.abs(theorem1_matrix(h, t, u) - phi[:n, :n]).max())
        return d, int(d > tol), d <= tol
    _run(report, "closed-form bound = potential", name, thm1)

    if N * N <= opts.max_configs:
        sol = None
        try:
            sol = solve_meeting(ss, "nonatomic")
        except MeetlabError as exc:
            report.add(Check("meeting averaging", RESULTS["meeting averaging"], name, None, 1,
                             False, f"error: {exc}"))
        if sol is not None:
            def meeteq():
                r = verify_meeteq(sol)
                ties = tied_configurations(sol)
                return r, int(r > opts.bound_tol), r <= opts.bound_tol, f"{ties} tied configurations"
            _run(report, "meeting averaging", name, meeteq)

            def msym():
                d = float(np.abs(sol.values - sol.values.T).max())
                return d, int(d > opts.bound_tol), d <= opts.bound_tol
            _run(report, "meeting symmetry", name, msym)

            def thm7():
                worst, viol = -np.inf, 0
                for hs in rep.hidden_states:
                    gap = sol.values - phi_tilde_matrix(eh, hs)
                    worst = max(worst, float(gap.max()))
                    viol += int((gap > opts.bound_tol).sum())
                return worst, viol, viol == 0, (
                    f"{len(rep.hidden_states)} hidden states, max M~ {sol.max_value:.6g}")
            _run(report, "meeting <= potential", name, thm7)
    else:
        report.add(Check("meeting <= potential", RESULTS["meeting <= potential"], name, None, 0,
                         True, "skipped (scale)"))

    def atomic():
        sol_a = solve_meeting(g, "atomic")
        gap = sol_a.values - phi_atomic_matrix(h, rep.atomic_hidden_vertex)
        viol = int((gap > opts.bound_tol).sum())
        return float(gap.max()), viol, viol == 0, f"z={rep.atomic_hidden_vertex}, max M {sol_a.max_value:.6g}"
    _run(report, "atomic meeting <= potential", name, atomic)

    start = ("v:0", f"v:{g.adjacency[0][0]}")

    def avoid():
        ev = original_meeting_events(ss, avoid_original_scheduler(ss), start, opts.seed,
                                     opts.sim_trials, opts.sim_rounds, skip_rounds=1)
        return float(ev), ev, ev == 0, f"{opts.sim_trials} trials x {opts.sim_rounds} rounds"
    _run(report, "no meeting at vertices (avoid)", name, avoid)

    def alt():
        ev = original_meeting_events(ss, alternating_scheduler(), start, opts.seed,
                                     opts.sim_trials, opts.sim_rounds, skip_rounds=1)
        return float(ev), ev, ev == 0, f"{opts.sim_trials} trials x {opts.sim_rounds} rounds"
    _run(report, "no meeting at vertices (2-fair)", name, alt)
    return report


# -- sweeps ----------------------------------------------------------------------

SWEEP_COLUMNS = ("family", "n", "m", "H_G", "max_phi", "max_M_nonatomic", "max_M_atomic",
                 "max_theorem1", "slack", "hidden", "seconds", "error")


def sweep_row(family: str, n: int, k: int | None = None, seed: int | None = None) -> dict:
    """One sweep row; errors are recorded in the row instead of raised."""
    row = dict.fromkeys(SWEEP_COLUMNS, "")
    row.update(family=family, n=n)
    t0 = time.perf_counter()
    try:
        if family == "lollipop" and k is None:
            k = max(3, n // 2)
        g = generate(family, n, k=k, seed=seed)
        ss = StateSpace(g)
        h = hitting_times(g)
        eh = ext_hitting_formula(ss, h)
        rep = find_hidden(eh, ss, h)
        phi = phi_tilde_matrix(eh, rep.chosen_hidden)
        hs = ss.states[rep.chosen_hidden]
        bound = theorem1_matrix(h, hs.x, hs.y)
        row.update(m=g.m, H_G=h.H_G, max_phi=float(phi.max()), max_theorem1=float(bound.max()),
                   hidden=str(hs))
        if ss.size ** 2 <= MAX_CONFIGS:
            sol = solve_meeting(ss, "nonatomic")
            row["max_M_nonatomic"] = sol.max_value
            row["slack"] = float((bound - sol.values[: g.n, : g.n]).min())
        else:
            row["error"] = "nonatomic skipped (scale)"
        row["max_M_atomic"] = solve_meeting(g, "atomic").max_value
    except (MeetlabError, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["seconds"] = round(time.perf_counter() - t0, 3)
    return row


def loglog_slope(ns, values) -> float:
    """Least-squares slope of log(values) against log(ns)."""
    return float(np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(values, float)), 1)[0])

