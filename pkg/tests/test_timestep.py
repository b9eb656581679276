import numpy as np
import pytest

from ofldg.damping import DampingParams
from ofldg.field import DGField1D
from ofldg.flux import FluxConfig
from ofldg.geometry import build_uniform_1d, build_uniform_2d
from ofldg.problems import get_problem
from ofldg.semidiscrete import SchemeState1D
from ofldg.timestep import (
    NumericalBlowupError,
    StepControl,
    dt_1d,
    dt_2d,
    integrate,
    ssp_rk3_step,
    stable_cfl,
)


def test_rk3_matches_linear_stage_polynomial():
    """For u' = lambda u one step multiplies by 1 + z + z^2/2 + z^3/6."""
    lam = -0.8 + 0.3j
    dt = 0.37
    z = lam * dt
    u1 = ssp_rk3_step(1.0 + 0j, dt, lambda u, t: lam * u)
    expected = 1 + z + z ** 2 / 2 + z ** 3 / 6
    assert abs(u1 - expected) < 1e-13


def test_rk3_third_order_on_nonlinear_ode():
    # u' = u^2, u(0) = 1, exact u(t) = 1/(1-t); error per step is O(dt^4)
    errs = []
    for dt in (0.01, 0.005):
        u = ssp_rk3_step(1.0, dt, lambda u, t: u * u)
        errs.append(abs(u - 1.0 / (1.0 - dt)))
    assert np.log2(errs[0] / errs[1]) > 3.7


def test_rk3_time_dependent_rhs():
    # u' = t^2: stage times must enter or this misses the exact cubic
    dt = 0.5
    u = ssp_rk3_step(0.0, dt, lambda u, t: t * t)
    assert u == pytest.approx(dt ** 3 / 3, rel=1e-12)


def test_dt_formulas():
    # cfl / (b/h^2 + c/h)
    ctrl = StepControl(cfl=0.1, b_bound=8.0, c_bound=0.0, t_end=2.0)
    mesh = build_uniform_1d(-6.0, 6.0, 320)
    assert dt_1d(ctrl, mesh) == pytest.approx(0.1 * mesh.h ** 2 / 8.0)
    assert dt_1d(ctrl, mesh) == pytest.approx(1.7578125e-5)
    ctrl = StepControl(cfl=0.2, b_bound=1.0, c_bound=2.0, t_end=1.0)
    assert dt_1d(ctrl, mesh) == pytest.approx(0.2 / (1 / mesh.h ** 2 + 2 / mesh.h))
    m2 = build_uniform_2d(0.0, 1.0, 0.0, 2.0, 10, 10)
    ctrl2 = StepControl(cfl=0.1, b_bound=(1.0, 4.0), c_bound=(2.0, 0.0))
    expected = 0.1 / (1 / m2.hx ** 2 + 4 / m2.hy ** 2 + 2 / m2.hx)
    assert dt_2d(ctrl2, m2) == pytest.approx(expected)


def test_dt_requires_positive_speed():
    mesh = build_uniform_1d(0.0, 1.0, 4)
    with pytest.raises(ValueError):
        dt_1d(StepControl(cfl=0.1), mesh)
    with pytest.raises(ValueError):
        dt_2d(StepControl(cfl=0.1), build_uniform_2d(0, 1, 0, 1, 2, 2))


def test_stable_cfl_decreases_with_degree():
    values = [stable_cfl(k) for k in range(6)]
    assert all(a > b for a, b in zip(values, values[1:]))
    # the parabolic stage limit is far below the nominal 0.1 for k >= 1
    assert stable_cfl(1) < 0.1
    assert stable_cfl(2) == pytest.approx(0.9 * 2.5127 / 148.26)
    with pytest.raises(ValueError):
        stable_cfl(-1)


def test_step_control_caps_cfl():
    ctrl = StepControl.stable_for(2, b_bound=1.0, t_end=1.0, cfl=0.1)
    assert ctrl.cfl == pytest.approx(stable_cfl(2))
    tiny = StepControl.stable_for(2, b_bound=1.0, cfl=1e-4)
    assert tiny.cfl == 1e-4                   # smaller requests pass through
    with pytest.raises(ValueError):
        StepControl(cfl=0.0)


def _heat_state(n=24, k=2, cfl=None):
    prob = get_problem("heat2d")
    mesh = build_uniform_1d(0.0, 2 * np.pi, n)
    # 1D heat equation assembled ad hoc from the 2D problem's coefficients
    from ofldg.problems import ProblemSpec, _zero
    from ofldg.geometry import BoundaryCondition
    p1 = ProblemSpec(
        name="heat1d", dim=1, domain=(0.0, 2 * np.pi),
        bc=BoundaryCondition.periodic(), t_start=0.0, t_end=0.1,
        initial=np.sin, f1=_zero, df1=_zero,
        a1=prob.a1, b1=prob.b1, g1=prob.g1,
        exact=lambda x, t: np.exp(-t) * np.sin(x), has_convection=False)
    u = DGField1D.l2_project(p1.initial, mesh, k)
    state = SchemeState1D(u=u, problem=p1, flux=FluxConfig(),
                          damping=DampingParams(enabled=False, k=k))
    ctrl = StepControl.stable_for(k, b_bound=1.0, t_end=0.1,
                                  cfl=cfl if cfl else 0.1)
    return state, ctrl


def test_integrate_lands_exactly_on_events():
    state, ctrl = _heat_state()
    res = integrate(state, ctrl, snapshot_times=[0.0, 0.033, 0.1])
    assert res.t == 0.1
    times = [t for t, _ in res.snapshots]
    assert times == [0.0, 0.033, 0.1]
    # the heat kernel decay shows up in the snapshots
    u0 = res.snapshots[0][1]
    u1 = res.snapshots[-1][1]
    assert u1.l2_norm() < u0.l2_norm()
    err = u1.norms(lambda x: np.exp(-0.1) * np.sin(x))["l2"]
    assert err < 1e-3


def test_integrate_records_traces_and_extremes():
    state, ctrl = _heat_state()
    initial_crest = float(np.max(state.u.cell_averages()[1]))
    res = integrate(state, ctrl, trace_every=5)
    assert res.n_steps > 0
    assert len(res.traces) >= res.n_steps // 5
    assert res.traces[-1].t == pytest.approx(0.1)
    # mass of sin over a full period stays at zero
    assert abs(res.traces[-1].mass) < 1e-12
    # cell means of the decaying sine peak at the start of the run
    assert res.max_avg == pytest.approx(initial_crest, rel=1e-12)
    assert res.min_avg == pytest.approx(-initial_crest, abs=1e-12)


def test_integrate_raises_on_blowup():
    state, _ = _heat_state(n=16)
    # far beyond the parabolic stage limit; amplification overflows
    wild = StepControl(cfl=2.0, b_bound=1.0, t_end=20.0)
    with np.errstate(all="ignore"):
        with pytest.raises(NumericalBlowupError) as err:
            integrate(state, wild)
    assert err.value.t >= 0.0


def test_integrate_honors_t_start_override():
    state, ctrl = _heat_state()
    res = integrate(state, ctrl, t_start=0.05)
    assert res.t == pytest.approx(0.1)
    assert res.n_steps == int(np.ceil(0.05 / res.dt))
