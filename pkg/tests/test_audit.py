import pytest

from conftest import rank_points
from shallowtree.audit import audit_index, inject_fault
from shallowtree.fast import build_fast
from shallowtree.linear import build_linear


@pytest.mark.parametrize("build", [build_linear, build_fast])
def test_clean_index_passes(build):
    rep = audit_index(build(rank_points(400, 1), rho=2, t0=8))
    assert rep.ok and rep.witness is None and not rep.violations


@pytest.mark.parametrize("build", [build_linear, build_fast])
def test_swapped_slot_map_is_caught(build):
    idx = build(rank_points(400, 2), rho=2, t0=8)
    inject_fault(idx, "decode")
    rep = audit_index(idx)
    assert not rep.ok and rep.witness is not None
    assert any("decodes to position" in v for v in rep.violations)


@pytest.mark.parametrize("build", [build_linear, build_fast])
def test_cleared_d_entry_is_caught(build):
    idx = build(rank_points(400, 3), rho=2, t0=4)
    inject_fault(idx, "dcell")
    rep = audit_index(idx)
    assert not rep.ok
    assert any("no D-cell" in v for v in rep.violations)


def test_fault_hook_arguments():
    idx = build_linear(rank_points(50, 0), rho=2, t0=4)
    with pytest.raises(ValueError):
        inject_fault(idx, "bitrot")
    with pytest.raises(ValueError):
        inject_fault(build_linear(rank_points(1, 0)), "decode")
    with pytest.raises(TypeError):
        audit_index(object())
