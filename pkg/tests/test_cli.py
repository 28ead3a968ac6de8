"""End-to-end command tests driving main() in process.

Every JSON payload the tool prints is validated against the schema
shipped in the package, so the schemas cannot drift from the output.
"""

import json
from importlib import resources

import jsonschema
import pytest

from tanfam.cli import (
    EXIT_CONTRADICTS,
    EXIT_INDETERMINATE,
    EXIT_MALFORMED,
    EXIT_OK,
    main,
)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out) if out else None, err


def check_schema(payload, name):
    schema_dir = resources.files("tanfam") / "schemas"
    schema = json.loads((schema_dir / f"{name}.schema.json").read_text())
    jsonschema.validate(payload, schema)


# ---------------------------------------------------------------------------
# classify


def test_classify_fold(capsys):
    code, payload, _ = run_json(capsys, "classify", "--input", '{"u": "1 t^2"}')
    assert code == EXIT_OK
    assert payload["variant"] == "TypeI"
    assert payload["reason"] is None
    check_schema(payload, "classify")


def test_classify_negative_modulus(capsys):
    code, payload, _ = run_json(capsys, "classify", "--input", '{"u": "1 xi t^2"}')
    assert code == EXIT_OK
    assert payload["variant"] == "A1Minus"
    assert payload["a"] == "-1"
    assert payload["projection_form_applicable"] is False
    check_schema(payload, "classify")


def test_classify_from_invariants(capsys):
    code, payload, _ = run_json(
        capsys, "classify", "--input", '{"k0": "0", "k1": "1", "alpha": "1/2"}'
    )
    assert code == EXIT_OK
    assert payload["variant"] == "A1Plus"
    assert payload["a"] == "1/4"
    assert payload["projection_form_applicable"] is True
    check_schema(payload, "classify")


def test_classify_indeterminate_exit(capsys):
    code, payload, _ = run_json(capsys, "classify", "--input", '{"u": "1 t^4"}')
    assert code == EXIT_INDETERMINATE
    assert payload["variant"] == "IndeterminateAtOrder"
    check_schema(payload, "classify")


def test_classify_not_tangential_is_a_verdict(capsys):
    code, payload, _ = run_json(capsys, "classify", "--input", '{"u": "1 t"}')
    assert code == EXIT_OK
    assert payload["variant"] == "NotTangential"
    assert payload["a"] is None
    assert payload["reason"]
    check_schema(payload, "classify")


@pytest.mark.parametrize(
    "raw",
    [
        '{"u": "1 q^2"}',  # unknown variable
        '{"u": "1/0 t^2"}',  # bad coefficient
        "{not json",
        '{"k0": "1"}',  # invariants incomplete
        "[1, 2]",  # not an object
        "no-such-file.json",
    ],
)
def test_classify_malformed_inputs(capsys, raw):
    code, out, err = run(capsys, "classify", "--input", raw)
    assert code == EXIT_MALFORMED
    assert out == ""
    assert err.startswith("error:")


def test_classify_file_input(capsys, tmp_path):
    path = tmp_path / "family.json"
    path.write_text('{"u": "1 t^2"}')
    code, payload, _ = run_json(capsys, "classify", "--input", str(path))
    assert code == EXIT_OK
    assert payload["variant"] == "TypeI"


def test_classify_out_redirects_payload(capsys, tmp_path):
    out_file = tmp_path / "verdict.json"
    code, out, _ = run(
        capsys, "classify", "--input", '{"u": "1 t^2"}', "--out", str(out_file)
    )
    assert code == EXIT_OK
    assert out == ""
    assert json.loads(out_file.read_text())["variant"] == "TypeI"


def test_classify_order_out_of_range(capsys):
    code, _, err = run(capsys, "classify", "--input", '{"u": "1 t^2"}', "--order", "9")
    assert code == EXIT_MALFORMED
    assert "--order" in err


# ---------------------------------------------------------------------------
# verify


def test_verify_fold_sufficiency(capsys):
    code, payload, _ = run_json(capsys, "verify", "--kind", "fold-sufficiency")
    assert code == EXIT_OK
    assert payload["predicted"] is True and payload["measured"] is True
    assert payload["agrees"] is True
    assert payload["order"] == 4
    check_schema(payload, "verify")


def test_verify_ideal_block_generic_modulus(capsys):
    code, payload, _ = run_json(capsys, "verify", "--kind", "ideal-block", "--a", "1/5")
    assert code == EXIT_OK
    assert payload["params"] == {"a": "1/5", "b": "1"}
    assert payload["measured"] is True and payload["agrees"] is True
    check_schema(payload, "verify")


def test_verify_ideal_block_predicted_failure_agrees(capsys):
    code, payload, _ = run_json(capsys, "verify", "--kind", "ideal-block", "--a", "0")
    assert code == EXIT_OK
    assert payload["predicted"] is False and payload["measured"] is False
    assert payload["detail"]["witness"] is not None
    check_schema(payload, "verify")


def test_verify_ideal_block_contradiction_exits_three(capsys):
    # a = -1 sits on the excluded list, yet the block containment holds,
    # so the measurement contradicts the prediction and the exit says so
    code, payload, _ = run_json(capsys, "verify", "--kind", "ideal-block", "--a=-1")
    assert code == EXIT_CONTRADICTS
    assert payload["predicted"] is False and payload["measured"] is True
    assert payload["agrees"] is False
    check_schema(payload, "verify")


def test_verify_miniversal_degenerate_agrees(capsys):
    code, payload, _ = run_json(
        capsys, "verify", "--kind", "miniversal", "--a", "1/5", "--b", "0"
    )
    assert code == EXIT_OK
    assert payload["predicted"] is False and payload["measured"] is False
    check_schema(payload, "verify")


def test_verify_miniversal_stated_complement_contradiction(capsys):
    code, payload, _ = run_json(
        capsys, "verify", "--kind", "miniversal", "--a", "1/5", "--b", "1"
    )
    assert code == EXIT_CONTRADICTS
    assert payload["predicted"] is True and payload["measured"] is False
    assert payload["detail"]["dependent_complement_vectors"]
    check_schema(payload, "verify")


def test_verify_needs_modulus(capsys):
    code, _, err = run(capsys, "verify", "--kind", "ideal-block")
    assert code == EXIT_MALFORMED
    assert "--a" in err


def test_verify_missing_kind_is_usage_error(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["verify"])
    assert excinfo.value.code == 2


# ---------------------------------------------------------------------------
# envelope


def test_envelope_type_two(capsys, tmp_path):
    svg = tmp_path / "env.svg"
    code, payload, _ = run_json(
        capsys,
        "envelope",
        "--input",
        '{"u": "1 xi t^2"}',
        "--grid",
        "128",
        "--out",
        str(svg),
    )
    assert code == EXIT_OK
    assert payload["branches"] == 2
    assert payload["cusps"] == 0
    assert len(payload["fits"]) == 2
    assert payload["svg"] == str(svg)
    assert svg.exists() and "<svg" in svg.read_text()
    check_schema(payload, "envelope")


def test_envelope_raw_components_and_domain(capsys, tmp_path):
    code, payload, _ = run_json(
        capsys,
        "envelope",
        "--input",
        '{"components": ["1 xi + 1 t", "1 t^2"]}',
        "--grid",
        "64",
        "--domain=-1.5,1.5,-1,1",
        "--out",
        str(tmp_path / "env.svg"),
    )
    assert code == EXIT_OK
    assert payload["branches"] == 1
    assert payload["grid"]["domain"] == [[-1.5, 1.5], [-1.0, 1.0]]
    check_schema(payload, "envelope")


def test_envelope_empty_window_notes_it(capsys, tmp_path):
    # constant Jacobian determinant: no criminant anywhere
    code, payload, _ = run_json(
        capsys,
        "envelope",
        "--input",
        '{"components": ["1 xi", "1 t"]}',
        "--grid",
        "32",
        "--out",
        str(tmp_path / "env.svg"),
    )
    assert code == EXIT_OK
    assert payload["branches"] == 0
    assert payload["note"] == "no criminant in the window"
    check_schema(payload, "envelope")


def test_envelope_not_tangential_family_hints_components(capsys, tmp_path):
    code, _, err = run(
        capsys,
        "envelope",
        "--input",
        '{"u": "1 t"}',
        "--out",
        str(tmp_path / "env.svg"),
    )
    assert code == EXIT_MALFORMED
    assert "components" in err


def test_envelope_rejects_component_list_of_wrong_length(capsys, tmp_path):
    code, _, err = run(
        capsys,
        "envelope",
        "--input",
        '{"components": ["1 t"]}',
        "--out",
        str(tmp_path / "env.svg"),
    )
    assert code == EXIT_MALFORMED
    assert "two polynomial texts" in err


# ---------------------------------------------------------------------------
# sweep


def test_sweep_writes_frames_and_manifest(capsys, tmp_path):
    out_dir = tmp_path / "sweep"
    code, payload, _ = run_json(
        capsys,
        "sweep",
        "--a=-1/2",
        "--lambdas=-0.1,0,0.1",
        "--grid",
        "32",
        "--out",
        str(out_dir),
    )
    assert code == EXIT_OK
    assert len(payload["cusp_counts"]) == 3
    assert payload["directory"] == str(out_dir)
    check_schema(payload, "sweep")
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest == payload["manifest"]
    check_schema(manifest, "sweep-manifest")
    for entry in manifest["frames"]:
        frame = json.loads((out_dir / entry["file"]).read_text())
        check_schema(frame, "sweep-frame")
        assert frame["cusps"] == entry["cusps"]


def test_sweep_rejects_excluded_modulus(capsys, tmp_path):
    code, _, err = run(
        capsys, "sweep", "--a", "0", "--out", str(tmp_path / "s")
    )
    assert code == EXIT_MALFORMED
    assert err.startswith("error:")


def test_sweep_beaks_rejects_mu(capsys, tmp_path):
    code, _, err = run(
        capsys,
        "sweep",
        "--a=-1/2",
        "--mu1",
        "0.1",
        "--out",
        str(tmp_path / "s"),
    )
    assert code == EXIT_MALFORMED
    assert "versal" in err


def test_sweep_bad_lambdas(capsys, tmp_path):
    code, _, err = run(
        capsys, "sweep", "--a=-1/2", "--lambdas", "x,y", "--out", str(tmp_path / "s")
    )
    assert code == EXIT_MALFORMED
    assert "--lambdas" in err


# ---------------------------------------------------------------------------
# selfcheck


def test_selfcheck_quick(capsys):
    code, payload, _ = run_json(
        capsys, "selfcheck", "--rounds", "20", "--samples", "3"
    )
    assert code == EXIT_OK
    assert payload["ok"] is True
    assert [r["name"] for r in payload["results"]] == [
        "ring-laws",
        "leibniz",
        "chain-rule",
        "composition",
        "rank-oracle",
    ]
    check_schema(payload, "selfcheck")


def test_selfcheck_out_file(capsys, tmp_path):
    out_file = tmp_path / "report.json"
    code, out, _ = run(
        capsys,
        "selfcheck",
        "--rounds",
        "10",
        "--samples",
        "2",
        "--out",
        str(out_file),
    )
    assert code == EXIT_OK
    assert out == ""
    assert json.loads(out_file.read_text())["ok"] is True


# ---------------------------------------------------------------------------
# rendering and shared flags


def test_text_format(capsys):
    code, out, _ = run(
        capsys, "classify", "--input", '{"u": "1 t^2"}', "--format", "text"
    )
    assert code == EXIT_OK
    assert "variant: TypeI" in out
    assert "reason: none" in out
    assert "{" not in out


def test_json_output_is_stable(capsys):
    _, first, _ = run(capsys, "classify", "--input", '{"u": "1 t^2"}')
    _, second, _ = run(capsys, "classify", "--input", '{"u": "1 t^2"}')
    assert first == second
    assert first.endswith("\n")


def test_grid_too_small(capsys, tmp_path):
    code, _, err = run(
        capsys,
        "envelope",
        "--input",
        '{"u": "1 t^2"}',
        "--grid",
        "1",
        "--out",
        str(tmp_path / "e.svg"),
    )
    assert code == EXIT_MALFORMED
    assert "--grid" in err


def test_bad_domain(capsys, tmp_path):
    code, _, err = run(
        capsys,
        "envelope",
        "--input",
        '{"u": "1 t^2"}',
        "--domain",
        "1,2,3",
        "--out",
        str(tmp_path / "e.svg"),
    )
    assert code == EXIT_MALFORMED
    assert "--domain" in err
