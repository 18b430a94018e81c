"""Smoke test for the pattern_forge extension module."""

import json
import math
import sys

import pattern_forge as pf

GRID = {
    "spec_version": 1,
    "arrangement": {"kind": "lattice", "lattice": {"cell": {"shape": "square", "a": 10}}},
    "groups": [{"shape": "circle", "size": 4}],
}


def main() -> int:
    spec = pf.PatternSpec(json.dumps(GRID))
    host = pf.Host("rect:100x100")
    assert spec.depth == 1 and spec.group_count == 1

    pattern = pf.compile(spec, host)
    assert pattern.primitive_count == 121, pattern.primitive_count
    assert pattern.composition == "2×2×2"

    svg = pattern.render_svg()
    assert svg.startswith("<?xml") and svg.count("<circle") == 121
    assert svg == pf.compile(spec, host, parallel=True).render_svg()

    metrics = pattern.metrics(supersample=8)
    assert abs(metrics["ink_ratio"] - math.pi * 4 / 100) < 2e-3, metrics
    assert set(metrics) == {"ink_ratio", "regional_shade", "solid_fill", "resolution"}

    rotated = dict(GRID, groups=[{"shape": "square", "size": 4, "orientation": 45}])
    square = dict(GRID, groups=[{"shape": "square", "size": 4}])
    preserved, report = pf.check_value_preservation(
        pf.PatternSpec(json.dumps(square)), pf.PatternSpec(json.dumps(rotated)), pf.Host.rect(400, 400)
    )
    assert preserved, report

    try:
        pf.PatternSpec(json.dumps(dict(GRID, groups=[])))
    except pf.SpecError as e:
        err = json.loads(e.args[0])
        assert "path" in err and "message" in err
    else:
        raise AssertionError("empty groups accepted")

    solid = pf.PatternSpec(json.dumps(dict(GRID, groups=[{"shape": "square", "size": 12}])))
    assert [w["kind"] for w in pf.validate(solid, host)] == ["solid-fill-risk"]

    report = pf.run_gallery()
    failed = [e["name"] for e in report["entries"] if not e["passed"]]
    assert not failed, failed

    assert json.loads(pf.schema())["$defs"]["pattern"]["properties"]["spec_version"]["const"] == 1
    print(f"ok: {len(report['entries'])} gallery entries pass, ink {metrics['ink_ratio']:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
