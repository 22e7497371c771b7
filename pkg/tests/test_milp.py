import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from compact_layering import DiGraph, Layering, Objective, RandomGraphSpec, Weights, evaluate, generate_random
from compact_layering.milp import (
    BINARY,
    CONTINUOUS,
    DecodeError,
    FormulationError,
    LinExpr,
    MilpModel,
    build_cgl,
    build_ext,
    build_mml,
    build_model,
    check_assignment,
    decode_solution,
    encode_layering,
)
from compact_layering.milp.build import arc_tags

from helpers import C3, layered_graphs


def ext_counts(n, m, H, anchor=True):
    z = m * max(H - 2, 0)
    nvars = n * H + m + z + 1
    rows = {"assign": n, "noshare": m * H, "reverse": m * H, "width_outer": min(H, 2),
            "width_inner": max(H - 2, 0), "dummy1": z, "dummy2": z}
    if anchor:
        rows["anchor"] = 1
    return nvars, {k: v for k, v in rows.items() if v}


def cgl_counts(n, m, H, anchor=True):
    z = m * max(H - 2, 0)
    nvars = n * (H - 1) + m + z + 1
    rows = {"transitivity": n * max(H - 2, 0), "order_fwd": m * H, "order_bwd": m * H, "dummy1": z,
            "dummy2": z, "width_outer": min(H, 2), "width_inner": max(H - 2, 0)}
    if anchor:
        rows["anchor"] = 1
    return nvars, {k: v for k, v in rows.items() if v}


def test_ext_size_c3():
    model, vm = build_ext(C3, 3, anchor=False)
    assert model.num_vars == 16
    assert model.group_counts() == {"assign": 3, "noshare": 9, "reverse": 9, "width_outer": 2,
                                    "width_inner": 1, "dummy1": 3, "dummy2": 3}


def test_cgl_size_c3():
    model, vm = build_cgl(C3, 3, anchor=False)
    assert model.num_vars == 13
    assert sum(1 for role in vm.roles if role[0] == "y") == 6
    assert model.group_counts()["transitivity"] == 3


@pytest.mark.parametrize("n, m, H", [(3, 3, 2), (5, 0, 4), (6, 9, 5), (8, 12, 7), (4, 6, 3)])
def test_closed_form_sizes(n, m, H):
    g = generate_random(RandomGraphSpec(n, m / n, 1)) if m else DiGraph(n)
    assert g.m == m
    for anchor in (True, False):
        model, _ = build_ext(g, H, anchor=anchor)
        assert (model.num_vars, model.group_counts()) == ext_counts(n, m, H, anchor)
        model, _ = build_cgl(g, H, anchor=anchor)
        assert (model.num_vars, model.group_counts()) == cgl_counts(n, m, H, anchor)


def test_height_two_has_no_dummy_machinery():
    g = DiGraph.from_edges([(0, 1), (1, 2)])
    for build in (build_ext, build_cgl):
        model, vm = build(g, 2)
        assert not vm.z
        assert "width_inner" not in model.group_counts()
        assert model.group_counts()["width_outer"] == 2


def test_height_too_small():
    with pytest.raises(FormulationError):
        build_ext(C3, 1)
    model, _ = build_cgl(DiGraph(2), 1)
    assert model.num_vars == 1


def test_variable_names_and_parallel_tags():
    g = DiGraph(3, ((0, 1), (0, 1), (1, 2), (0, 1)))
    assert arc_tags(g) == ["0_1", "0_1_p1", "1_2", "0_1_p2"]
    model, _ = build_ext(g, 3)
    names = {v.name for v in model.variables}
    assert {"x_0_1", "r_0_1_p1", "z_0_1_p2_2", "W"} <= names
    model, _ = build_mml(g, 3, signed=False)
    names = {v.name for v in model.variables}
    assert {"y_2_3", "Wr", "l_1_2"} <= names and not any(n.startswith("z_") for n in names)


def test_binary_and_continuous_kinds():
    model, vm = build_ext(C3, 3)
    kinds = {v.name[0]: v.kind for v in model.variables}
    assert kinds["x"] == BINARY
    assert kinds["r"] == kinds["z"] == kinds["W"] == CONTINUOUS
    r = model.variables[vm.r[0]]
    assert (r.lower, r.upper) == (0, 1)


def test_c3_encodings():
    lay = Layering(3, (1, 2, 3))
    for kind in ("ext", "cgl"):
        model, vm = build_model(kind, C3, 3)
        res = check_assignment(model, encode_layering(vm, lay))
        assert res.feasible and res.objective == 15
    model, vm = build_mml(C3, 3, signed=True)
    assert not vm.l
    assert check_assignment(model, encode_layering(vm, lay)).objective == 10
    model, vm = build_mml(C3, 3, signed=False)
    assert check_assignment(model, encode_layering(vm, lay)).objective == 14


def test_objective_line_weights():
    model, vm = build_cgl(C3, 3)
    assert model.objective[vm.r[0]] == 9
    assert model.objective_constant == 3


def raw_assignment(vm, layers):
    """Encoding by the variable definitions, without validating the layering."""
    g = vm.graph
    out = []
    for role in vm.roles:
        if role[0] == "x":
            out.append(int(layers[role[1]] == role[2]))
        elif role[0] == "y":
            out.append(int(layers[role[1]] < role[2]))
        elif role[0] == "r":
            u, v = g.arcs[role[1]]
            out.append(int(layers[u] > layers[v]))
        elif role[0] == "z":
            u, v = g.arcs[role[1]]
            out.append(int(min(layers[u], layers[v]) < role[2] < max(layers[u], layers[v])))
        else:
            out.append(10)
    return out


def test_shared_layer_violates_rows():
    g = DiGraph.from_edges([(0, 1)])
    model, vm = build_ext(g, 3, anchor=False)
    res = check_assignment(model, raw_assignment(vm, (2, 2)))
    assert not res.feasible and res.violated == "noshare_0_1_2"
    model, vm = build_cgl(g, 3, anchor=False)
    values = raw_assignment(vm, (2, 2))
    res = check_assignment(model, values)
    assert not res.feasible and res.violated == "fwd_0_1_2"
    # with r = 1 the forward row holds and the backward row fails instead
    values[vm.r[0]] = 1
    assert check_assignment(model, values).violated == "bwd_0_1_2"


def test_check_reports_bounds_and_integrality():
    model, vm = build_ext(C3, 3)
    values = encode_layering(vm, Layering(3, (1, 2, 3)))
    bad = list(values)
    bad[vm.r[0]] = 2
    assert check_assignment(model, bad).violated == f"bound:{model.variables[vm.r[0]].name}"
    bad = list(values)
    bad[vm.x[(0, 1)]] = Fraction(1, 2)
    assert check_assignment(model, bad).violated == "integrality:x_0_1"
    assert check_assignment(model, bad, tol=0.6).violated != "integrality:x_0_1"
    with pytest.raises(ValueError):
        check_assignment(model, values[:-1])


def test_anchor_row():
    model, vm = build_cgl(C3, 4)
    assert check_assignment(model, encode_layering(vm, Layering(4, (1, 2, 3)))).feasible
    res = check_assignment(model, encode_layering(vm, Layering(4, (2, 3, 4))))
    assert res.violated == "anchor"


def test_decode_examples():
    model, vm = build_cgl(C3, 3)
    values = encode_layering(vm, Layering(3, (2, 1, 3)))
    assert [values[vm.y_below[(0, k)]] for k in (2, 3)] == [0, 1]
    assert decode_solution(vm, values).layer_of == (2, 1, 3)
    zeros = [0] * model.num_vars
    with pytest.raises(DecodeError):
        decode_solution(vm, zeros)
    model, vm = build_ext(C3, 3)
    values = encode_layering(vm, Layering(3, (3, 2, 1)))
    assert [values[vm.x[(1, k)]] for k in (1, 2, 3)] == [0, 1, 0]
    noisy = [float(x) + 3e-7 if x == 0 else x for x in values]
    assert decode_solution(vm, noisy).layer_of == (3, 2, 1)
    noisy[vm.x[(0, 3)]] = 0.5
    with pytest.raises(DecodeError):
        decode_solution(vm, noisy)


MODEL_BUILDS = [
    ("ext", lambda g, H: build_ext(g, H, anchor=False), Objective.CGLP),
    ("cgl", lambda g, H: build_cgl(g, H, anchor=False), Objective.CGLP),
    ("cgl-unreduced", lambda g, H: build_cgl(g, H, anchor=False, reduced=False), Objective.CGLP),
    ("mml-signed", lambda g, H: build_mml(g, H, anchor=False, signed=True), Objective.MML_SIGNED),
    ("mml-abs", lambda g, H: build_mml(g, H, anchor=False, signed=False), Objective.MML_ABS),
]


@pytest.mark.parametrize("label, build, objective", MODEL_BUILDS, ids=[m[0] for m in MODEL_BUILDS])
@given(case=layered_graphs())
def test_encoding_completeness(label, build, objective, case):
    g, lay = case
    model, vm = build(g, lay.height)
    values = encode_layering(vm, lay)
    res = check_assignment(model, values)
    assert res.feasible, res.violated
    assert res.objective == evaluate(g, lay, objective, vm.weights)
    assert decode_solution(vm, values) == lay


@pytest.mark.parametrize("label, build, objective", MODEL_BUILDS, ids=[m[0] for m in MODEL_BUILDS])
@given(case=layered_graphs(max_n=5, max_m=8))
def test_encoding_is_tight(label, build, objective, case):
    """Lowering any continuous variable with a positive cost makes the point infeasible."""
    g, lay = case
    model, vm = build(g, lay.height)
    values = encode_layering(vm, lay)
    for j, var in enumerate(model.variables):
        if var.kind != CONTINUOUS or model.objective.get(j, 0) <= 0:
            continue
        if var.lower is not None and values[j] <= var.lower:
            continue
        lowered = list(values)
        lowered[j] -= Fraction(1, 1000)
        assert not check_assignment(model, lowered).feasible, var.name


def test_unreduced_cgl_has_extra_rows():
    model, vm = build_cgl(C3, 3, reduced=False)
    groups = model.group_counts()
    assert groups["fix_below"] == groups["fix_above"] == 3
    assert groups["xor"] == 6
    assert vm.y_above


def test_varmap_json():
    model, vm = build_mml(C3, 3, signed=False)
    data = json.loads(vm.to_json(model))
    assert data["kind"] == "mml" and data["H"] == 3
    assert {"name": "l_0_1", "role": ["l", 0]} in data["variables"]
    assert vm.objective is Objective.MML_ABS


def test_linexpr_and_model_basics():
    m = MilpModel()
    x = m.add_var("x", BINARY)
    y = m.add_var("y", CONTINUOUS, None, 4)
    with pytest.raises(ValueError):
        m.add_var("x")
    e = 2 * LinExpr.var(x) + LinExpr.var(y) - 3
    m.add_constraint(e, "<=", 1, name="c")
    row = m.constraints[0]
    assert row.rhs == 4 and dict(row.coeffs) == {x: 2, y: 1}
    m.set_objective(LinExpr.var(y) + 1)
    assert m.objective_value([1, 2]) == 3
    assert m.index("y") == y
    other = MilpModel()
    other.add_var("x", BINARY)
    other.add_var("y", CONTINUOUS, None, 4)
    other.add_constraint(LinExpr.var(0, 2) + LinExpr.var(1), "<=", 4, name="c")
    other.set_objective(LinExpr.var(1) + 1)
    assert m.same_as(other)


@given(st.integers(0, 2**32))
def test_weights_flow_into_objective(seed):
    g = generate_random(RandomGraphSpec(5, 1.5, seed))
    w = Weights(Fraction(7, 3), 2, Fraction(1, 2))
    model, vm = build_cgl(g, 5, w)
    assert all(model.objective[j] == Fraction(7, 3) for j in vm.r)
    assert model.objective[vm.W] == Fraction(1, 2)
