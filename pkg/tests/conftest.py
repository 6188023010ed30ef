"""Suite-wide audit: every converged recovery outcome must be feasible.

A hook on the solvers records each converged outcome together with the
config it was solved under; at session end each one goes through
``verify_outcome`` and any infeasible outcome fails the run.
"""

import pytest

from tightcs.solvers import recovery, verify_outcome

_SEEN = []
_FAILED = []
_CRITERIA = []


def _record(problem, outcome, config):
    if outcome.converged:
        _SEEN.append((problem, outcome, config))


def pytest_configure(config):
    recovery.outcome_hooks.append(_record)


def pytest_sessionfinish(session, exitstatus):
    for problem, outcome, cfg in _SEEN:
        rep = verify_outcome(problem, outcome, config=cfg)
        ok = rep.feasible and rep.correlation_bound_holds is not False
        if not ok:
            _FAILED.append((problem.method, rep.feasibility_margin))
    if _FAILED and session.exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
    n = len(_SEEN)
    if not n:
        return
    status = "PASS" if not _FAILED else "FAIL"
    terminalreporter.write_line(
        f"[audit] {status}: {n - len(_FAILED)}/{n} converged recovery outcomes feasible")
    for method, margin in _FAILED[:10]:
        terminalreporter.write_line(f"[audit]   infeasible {method} outcome, margin {margin:.3e}")


@pytest.fixture
def audited():
    """Verify an outcome against a reference signal and assert the witnesses.

    Feasibility always; objective minimality and the cone constraint when
    the reference is feasible (ADS/ABP); the cone constraint and triangle
    inequality when the noise correlation is below ``mu / 2`` (ALASSO).
    """

    def check(problem, outcome, f_true=None, tol=1e-6, **kw):
        rep = verify_outcome(problem, outcome, f_true=f_true, tol=tol, **kw)
        assert rep.feasible, rep
        if rep.minimality_holds is not None:
            assert rep.minimality_holds, rep
        if rep.cone_holds is not None:
            assert rep.cone_holds, rep
        if rep.correlation_bound_holds is not None:
            assert rep.correlation_bound_holds, rep
        if rep.triangle_slack is not None:
            assert rep.triangle_slack >= -tol * (1 + rep.objective_true), rep
        return rep

    return check


@pytest.fixture
def criterion():
    """Record one acceptance line; returns True when the check and the time limit both pass."""

    def record(number, name, ok, detail, elapsed, limit):
        ok = bool(ok) and elapsed <= limit
        line = (f"criterion {number} {'PASS' if ok else 'FAIL'}: {name} "
                f"[{detail}; {elapsed:.1f}s of {limit:g}s]")
        _CRITERIA.append(line)
        print(line)
        return ok

    return record
