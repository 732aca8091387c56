"""Sessions: module wiring, input coercion, store semantics, resume, HTTP."""

from __future__ import annotations

import json
import shutil

import pytest
from fastapi.testclient import TestClient

from statbench.dsl.template import RenderedStatement
from statbench.errors import (
    DomainError,
    ScriptEvalError,
    ScriptSyntaxError,
    SessionError,
)
from statbench.registry import Registry, load_manifest
from statbench.server import (
    DEFAULT_MODULES_DIR,
    DEMO_CSV,
    ServerConfig,
    build_manager,
    create_app,
)
from statbench.session import SessionManager

TTEST_DEFAULT = (
    't_test(x = col("height_cm"), mu = 0, alternative = "two.sided", conf_level = 0.95)'
)
TINY = b"w,z\n1,a\n2,b\n3,a\n"

# a module whose single binding is guarded by an option value that is not
# the default, so the panel starts with no runnable computation
GUARDED = {
    "category": "summaries",
    "name": "guarded",
    "title": "Guarded",
    "inputs": [
        {"id": "x", "label": "Variable", "widget": "Select",
         "choice_source": "NumericVariables"},
        {"id": "mode", "label": "Mode", "widget": "Select",
         "choice_source": {"Static": ["plain", "fancy"]}, "default": "plain"},
        {"id": "flag", "label": "Flag", "widget": "Checkbox"},
        {"id": "picks", "label": "Picks", "widget": "MultiSelect",
         "choice_source": "NumericVariables"},
        {"id": "store", "label": "Store", "widget": "ActionButton"},
    ],
    "outputs": [{"id": "out", "kind": "Table", "title": "Guarded Summary"}],
    "bindings": [
        {"kernel": "numeric_summary", "when": {"mode": "fancy"}, "output_id": "out",
         "param_map": {"x": "x"}, "template": "numeric_summary(x = {x})"}
    ],
    "layout": {"options_width": 4, "results_width": 8},
    "store_button": "store",
}


@pytest.fixture
def manager() -> SessionManager:
    return build_manager(ServerConfig())


@pytest.fixture
def session(manager):
    return manager.create()


@pytest.fixture
def guarded_manager() -> SessionManager:
    sources = load_manifest(
        (DEFAULT_MODULES_DIR / "data" / "sources" / "manifest.json").read_bytes()
    )
    registry = Registry(modules=(sources, load_manifest(GUARDED)))
    return SessionManager(
        registry=registry, filename=DEMO_CSV.name, data=DEMO_CSV.read_bytes()
    )


@pytest.fixture
def client() -> TestClient:
    return TestClient(create_app(ServerConfig()))


class TestWiring:
    def test_defaults_computed_at_wiring(self, session):
        assert session.graph.peek("inference.ttest.in.x") == "height_cm"
        assert session.graph.peek("inference.ttest.in.hypval") == 0
        assert session.graph.peek("inference.ttest.in.conflevel") == 0.95
        assert session.module_code["inference/ttest"].text == TTEST_DEFAULT
        payload = session.output_payloads["inference.ttest.out.result"]
        assert payload["type"] == "text"
        assert payload["data"]["method"] == "One-sample t-test"

    def test_choice_nodes_follow_dataset(self, session):
        assert session.graph.peek("inference.ttest.choices.x") == [
            "height_cm",
            "study_hours",
            "exam_score",
            "sleep_hours",
        ]

    def test_sibling_selects_get_distinct_defaults(self, session):
        g = session.graph
        assert g.peek("inference.regression.in.response") == "height_cm"
        assert g.peek("inference.regression.in.explanatory") == "study_hours"
        assert g.peek("inference.contingency.in.rows") == "section"
        assert g.peek("inference.contingency.in.cols") == "handedness"

    def test_sources_panel_shows_dataset_info(self, session):
        assert session.module_code["data/sources"].text == "dataset_info()"
        payload = session.output_payloads["data.sources.out.info"]
        assert payload["type"] == "table"
        assert payload["n_rows"] == 120

    def test_script_starts_with_demo_preamble(self, session):
        assert session.script_text() == 'load_data("class_survey.csv")\n'


class TestSetInput:
    def test_change_recomputes_output_and_code(self, session):
        r = session.set_input_value("inference.ttest.in.hypval", 170)
        assert "inference.ttest.out.result" in r["outputs"]
        assert "mu = 170" in r["code_panel"]["inference/ttest"]
        assert "mu = 170" in session.module_code["inference/ttest"].text

    def test_noop_write_reports_nothing(self, session):
        session.set_input_value("inference.ttest.in.hypval", 170)
        r = session.set_input_value("inference.ttest.in.hypval", 170)
        assert r == {"outputs": {}, "code_panel": {}}

    def test_unknown_input_rejected(self, session):
        with pytest.raises(SessionError, match="unknown input"):
            session.set_input_value("inference.ttest.in.mystery", 1)

    def test_select_requires_membership(self, session):
        with pytest.raises(DomainError, match="not an available choice"):
            session.set_input_value("inference.ttest.in.x", "section")
        with pytest.raises(DomainError, match="takes a string"):
            session.set_input_value("inference.ttest.in.x", 42)

    def test_slider_snaps_to_grid(self, session):
        r = session.set_input_value("inference.ttest.in.conflevel", 0.893)
        assert session.graph.peek("inference.ttest.in.conflevel") == 0.89
        assert "conf_level = 0.89" in r["code_panel"]["inference/ttest"]

    def test_slider_range_enforced(self, session):
        with pytest.raises(DomainError, match="must lie within"):
            session.set_input_value("inference.ttest.in.conflevel", 1.5)
        with pytest.raises(DomainError, match="takes a number"):
            session.set_input_value("inference.ttest.in.conflevel", "big")

    def test_numeric_field_rules(self, session):
        with pytest.raises(DomainError, match="takes a number"):
            session.set_input_value("inference.ttest.in.hypval", True)
        with pytest.raises(DomainError, match="finite"):
            session.set_input_value("inference.ttest.in.hypval", float("inf"))
        session.set_input_value("inference.ttest.in.hypval", 2.5)
        assert "mu = 2.5" in session.module_code["inference/ttest"].text

    def test_action_button_takes_click_counts(self, session):
        with pytest.raises(DomainError, match="click count"):
            session.set_input_value("inference.ttest.in.store", -1)
        with pytest.raises(DomainError, match="click count"):
            session.set_input_value("inference.ttest.in.store", True)

    def test_checkbox_requires_boolean(self, guarded_manager):
        s = guarded_manager.create()
        with pytest.raises(DomainError, match="takes a boolean"):
            s.set_input_value("summaries.guarded.in.flag", "yes")
        s.set_input_value("summaries.guarded.in.flag", True)
        assert s.graph.peek("summaries.guarded.in.flag") is True

    def test_multiselect_rules(self, guarded_manager):
        s = guarded_manager.create()
        node = "summaries.guarded.in.picks"
        with pytest.raises(DomainError, match="list of strings"):
            s.set_input_value(node, "height_cm")
        with pytest.raises(DomainError, match="duplicate"):
            s.set_input_value(node, ["height_cm", "height_cm"])
        with pytest.raises(DomainError, match="not an available choice"):
            s.set_input_value(node, ["section"])
        s.set_input_value(node, ["height_cm", "exam_score"])
        assert s.graph.peek(node) == ["height_cm", "exam_score"]


class TestUpload:
    def test_upload_rewrites_preamble_and_resets_choices(self, session):
        payload = session.upload_data("tiny.csv", TINY)
        assert payload["n_rows"] == 3
        assert session.script_text() == 'load_data("tiny.csv")\n'
        assert session.graph.peek("inference.ttest.in.x") == "w"
        assert session.graph.peek("inference.contingency.in.rows") == "z"
        assert 'col("w")' in session.module_code["inference/ttest"].text

    def test_upload_keeps_still_valid_selection(self, session):
        session.set_input_value("inference.ttest.in.x", "exam_score")
        session.upload_data("t.csv", b"exam_score,extra\n1,2\n3,4\n")
        assert session.graph.peek("inference.ttest.in.x") == "exam_score"

    def test_upload_prunes_multiselect(self, guarded_manager):
        s = guarded_manager.create()
        node = "summaries.guarded.in.picks"
        s.set_input_value(node, ["height_cm", "exam_score"])
        s.upload_data("t.csv", b"height_cm,z\n1,a\n")
        assert s.graph.peek(node) == ["height_cm"]
        s.upload_data("u.csv", TINY)
        assert s.graph.peek(node) == []

    def test_upload_does_not_drop_stored_statements(self, session):
        session.store("inference", "ttest")
        session.upload_data("tiny.csv", TINY)
        lines = session.script_text().splitlines()
        assert lines[0] == 'load_data("tiny.csv")'
        assert lines[1] == TTEST_DEFAULT


class TestStore:
    def test_store_appends_statement(self, session):
        assert session.store("inference", "ttest") == 1
        assert session.script_text().splitlines()[1] == TTEST_DEFAULT
        assert session.store("inference", "ttest") == 2

    def test_store_unknown_module(self, session):
        with pytest.raises(SessionError, match="no module"):
            session.store("inference", "anova")

    def test_store_transform_mutates_dataset(self, session):
        assert session.store("data", "transform") == 1
        names = [c.name for c in session.graph.peek("dataset").columns]
        assert "log_height_cm" in names
        assert "log_height_cm" in session.graph.peek("inference.ttest.choices.x")
        assert (
            session.script.stored[0].text
            == 'transform(source = col("height_cm"), op = "log")'
        )
        # recreating the identical column on replay is a no-op, so storing
        # the same statement twice stays legal
        assert session.store("data", "transform") == 2

    def test_store_via_button_click(self, session):
        session.set_input_value("inference.ttest.in.store", 1)
        assert len(session.script.stored) == 1

    def test_statement_that_no_longer_evaluates_is_not_stored(self, session):
        session.module_code["inference/ttest"] = RenderedStatement(
            't_test(x = col("gone"), mu = 0, alternative = "two.sided", conf_level = 0.95)',
            "inference/ttest",
            0,
        )
        with pytest.raises(ScriptEvalError, match="gone"):
            session.store("inference", "ttest")
        assert session.script.stored == ()

    def test_nothing_to_store_until_a_binding_matches(self, guarded_manager):
        s = guarded_manager.create()
        payload = s.output_payloads["summaries.guarded.out.out"]
        assert payload["type"] == "error"
        assert "no computation matches" in payload["message"]
        with pytest.raises(DomainError, match="nothing to store"):
            s.store("summaries", "guarded")
        s.set_input_value("summaries.guarded.in.mode", "fancy")
        assert s.module_code["summaries/guarded"].text == 'numeric_summary(x = col("height_cm"))'
        assert s.store("summaries", "guarded") == 1


class TestModuleUI:
    def test_shape(self, session):
        ui = session.module_ui("inference", "ttest")
        assert ui["module_id"] == "inference/ttest"
        assert ui["title"] == "t-Test"
        assert ui["layout"] == {"options_width": 4, "results_width": 8}
        assert ui["store_button"] == "store"
        assert ui["statement"] == TTEST_DEFAULT

        by_id = {e["input_id"]: e for e in ui["inputs"]}
        assert by_id["x"]["id"] == "inference.ttest.in.x"
        assert by_id["x"]["value"] == "height_cm"
        assert by_id["x"]["choices"][0] == "height_cm"
        assert by_id["alternative"]["choices"] == ["two.sided", "greater", "less"]
        assert by_id["conflevel"]["widget"] == {
            "Slider": {"min": 0.01, "max": 0.99, "step": 0.01, "default": 0.95}
        }
        assert "choices" not in by_id["hypval"]

        (out,) = ui["outputs"]
        assert out["id"] == "inference.ttest.out.result"
        assert out["kind"] == "Text"
        assert out["result"]["type"] == "text"

    def test_unknown_module(self, session):
        with pytest.raises(SessionError, match="no module"):
            session.module_ui("inference", "anova")


class TestResume:
    def test_round_trip_is_a_fixpoint(self, manager):
        live = manager.create()
        live.set_input_value("inference.ttest.in.hypval", 170)
        live.store("inference", "ttest")
        text = live.script_text()
        resumed = manager.resume(text, DEMO_CSV.read_bytes())
        assert resumed.script_text() == text

    def test_missing_load_data_is_synthesized(self, manager):
        s = manager.resume('numeric_summary(x = col("w"))', TINY, filename="tiny.csv")
        lines = s.script_text().splitlines()
        assert lines[0] == 'load_data("tiny.csv")'
        assert lines[1] == 'numeric_summary(x = col("w"))'

    def test_transform_statements_replay_into_the_dataset(self, manager):
        script = 'load_data("d.csv")\ntransform(source = col("height_cm"), op = "log")\n'
        s = manager.resume(script, DEMO_CSV.read_bytes())
        assert "log_height_cm" in [c.name for c in s.graph.peek("dataset").columns]

    def test_domain_error_statements_are_kept(self, manager):
        script = 'load_data("t.csv")\nhistogram(x = col("z"), bins = 4)\n'
        s = manager.resume(script, TINY)
        assert 'histogram(x = col("z"), bins = 4)' in s.script_text()
        markdown, _ = s.report_bundle()["markdown"], None
        assert "> error:" in markdown

    def test_structural_failure_aborts_with_line(self, manager):
        with pytest.raises(ScriptEvalError) as info:
            manager.resume('load_data("t.csv")\nfrobnicate(x = 1)\n', TINY)
        assert info.value.line == 2
        with pytest.raises(ScriptSyntaxError):
            manager.resume("t_test(", TINY)

    def test_unloadable_data_rejected(self, manager):
        with pytest.raises(Exception, match="malformed|row"):
            manager.resume('load_data("t.csv")\n', b"a,b\n1\n")

    def test_expired_session_forgotten(self, manager):
        s = manager.create()
        manager.ttl_seconds = 0.0
        with pytest.raises(SessionError, match="no session"):
            manager.get(s.id)


class TestHTTP:
    def sid(self, client) -> str:
        return client.post("/api/sessions").json()["session_id"]

    def test_create_session(self, client):
        r = client.post("/api/sessions")
        assert r.status_code == 200
        assert isinstance(r.json()["session_id"], str)

    def test_list_modules(self, client):
        r = client.get("/api/modules")
        assert r.status_code == 200
        body = r.json()
        assert [s["heading"] for s in body["nav"]] == ["Data", "Summaries", "Inference"]
        ttest = body["nav"][2]["entries"][-1]
        assert ttest == {"id": "inference/ttest", "title": "t-Test"}
        assert len(body["enabled"]) == 7

    def test_module_ui_endpoint(self, client):
        sid = self.sid(client)
        r = client.get(f"/api/sessions/{sid}/modules/inference/ttest/ui")
        assert r.status_code == 200
        assert r.json()["module_id"] == "inference/ttest"
        assert client.get(f"/api/sessions/{sid}/modules/inference/anova/ui").status_code == 404
        assert client.get("/api/sessions/nope/modules/inference/ttest/ui").status_code == 404

    def test_set_input_endpoint(self, client):
        sid = self.sid(client)
        r = client.put(
            f"/api/sessions/{sid}/inputs/inference.ttest.in.hypval",
            json={"value": 170},
        )
        assert r.status_code == 200
        body = r.json()
        assert "inference.ttest.out.result" in body["outputs"]
        assert "mu = 170" in body["code_panel"]["inference/ttest"]

        bad = client.put(
            f"/api/sessions/{sid}/inputs/inference.ttest.in.hypval",
            json={"value": "tall"},
        )
        assert bad.status_code == 400
        missing = client.put(
            f"/api/sessions/{sid}/inputs/inference.ttest.in.hypval", json={}
        )
        assert missing.status_code == 400
        unknown = client.put(
            f"/api/sessions/{sid}/inputs/inference.ttest.in.nope", json={"value": 1}
        )
        assert unknown.status_code == 404

    def test_store_and_script_download(self, client):
        sid = self.sid(client)
        r = client.post(f"/api/sessions/{sid}/modules/inference/ttest/store")
        assert r.status_code == 200
        assert r.json() == {"script_length": 1}

        script = client.get(f"/api/sessions/{sid}/script")
        assert script.status_code == 200
        assert 'filename="analysis.sb"' in script.headers["content-disposition"]
        assert script.text == 'load_data("class_survey.csv")\n' + TTEST_DEFAULT + "\n"

        assert client.post(f"/api/sessions/{sid}/modules/inference/anova/store").status_code == 404

    def test_store_conflict_when_nothing_runnable(self, tmp_path):
        tree = tmp_path / "modules"
        (tree / "data").mkdir(parents=True)
        shutil.copytree(DEFAULT_MODULES_DIR / "data" / "sources", tree / "data" / "sources")
        target = tree / "summaries" / "guarded"
        target.mkdir(parents=True)
        (target / "manifest.json").write_text(json.dumps(GUARDED))
        client = TestClient(create_app(ServerConfig(modules_dir=tree)))

        sid = self.sid(client)
        r = client.post(f"/api/sessions/{sid}/modules/summaries/guarded/store")
        assert r.status_code == 409
        assert "nothing to store" in r.json()["detail"]
        ok = client.put(
            f"/api/sessions/{sid}/inputs/summaries.guarded.in.mode",
            json={"value": "fancy"},
        )
        assert ok.status_code == 200
        assert (
            client.post(f"/api/sessions/{sid}/modules/summaries/guarded/store").status_code
            == 200
        )

    def test_upload_and_download_data(self, client):
        sid = self.sid(client)
        r = client.post(
            f"/api/sessions/{sid}/data",
            params={"filename": "tiny.csv"},
            content=TINY,
            headers={"content-type": "text/csv"},
        )
        assert r.status_code == 200
        assert r.json()["n_rows"] == 3

        got = client.get(f"/api/sessions/{sid}/data")
        assert got.status_code == 200
        assert 'filename="tiny.csv"' in got.headers["content-disposition"]
        assert got.text == "w,z\n1,a\n2,b\n3,a\n"

    def test_upload_rejections(self, client):
        sid = self.sid(client)
        ragged = client.post(
            f"/api/sessions/{sid}/data",
            content=b"a,b\n1\n",
            headers={"content-type": "text/csv"},
        )
        assert ragged.status_code == 400
        assert "row" in ragged.json()["detail"]

        small = TestClient(create_app(ServerConfig(max_upload_bytes=16)))
        sid2 = small.post("/api/sessions").json()["session_id"]
        big = small.post(
            f"/api/sessions/{sid2}/data",
            content=b"x\n" + b"1\n" * 50,
            headers={"content-type": "text/csv"},
        )
        assert big.status_code == 413

    def test_download_reflects_stored_transforms(self, client):
        sid = self.sid(client)
        client.post(f"/api/sessions/{sid}/modules/data/transform/store")
        got = client.get(f"/api/sessions/{sid}/data")
        assert got.text.splitlines()[0].endswith(",log_height_cm")

    def test_resume_endpoint(self, client):
        script = 'load_data("tiny.csv")\nnumeric_summary(x = col("w"))\n'
        r = client.post(
            "/api/sessions/resume",
            json={"script": script, "data": TINY.decode(), "filename": "tiny.csv"},
        )
        assert r.status_code == 200
        sid = r.json()["session_id"]
        assert client.get(f"/api/sessions/{sid}/script").text == script

        assert (
            client.post("/api/sessions/resume", json={"script": "t_test(", "data": "x\n1\n"})
            .status_code
            == 400
        )
        assert (
            client.post("/api/sessions/resume", json={"script": 1, "data": "x\n1\n"})
            .status_code
            == 400
        )

    def test_code_visibility_and_report(self, client):
        sid = self.sid(client)
        client.post(f"/api/sessions/{sid}/modules/inference/ttest/store")
        client.put(f"/api/sessions/{sid}/inputs/summaries.graphical.in.bins", json={"value": 6})
        client.post(f"/api/sessions/{sid}/modules/summaries/graphical/store")

        report = client.post(f"/api/sessions/{sid}/report").json()
        assert report["markdown"].startswith("# Analysis Report")
        assert "```" in report["markdown"]
        assert list(report["images"]) == ["plot_001.svg"]
        assert report["include_code"] is True
        assert report["blocks"][0]["result"] is None  # setup block carries code only

        toggled = client.put(f"/api/sessions/{sid}/code-visibility", json={"visible": False})
        assert toggled.json() == {"visible": False}
        hidden = client.post(f"/api/sessions/{sid}/report").json()
        # result text still renders fenced; the statements themselves are gone
        assert "t_test(" not in hidden["markdown"]
        assert "load_data(" not in hidden["markdown"]
        assert all(b["code"] is None for b in hidden["blocks"])

        bad = client.put(f"/api/sessions/{sid}/code-visibility", json={"visible": "no"})
        assert bad.status_code == 400

    def test_report_conflict_when_column_vanished(self, client):
        sid = self.sid(client)
        client.post(f"/api/sessions/{sid}/modules/inference/ttest/store")
        client.post(
            f"/api/sessions/{sid}/data",
            content=TINY,
            headers={"content-type": "text/csv"},
        )
        r = client.post(f"/api/sessions/{sid}/report")
        assert r.status_code == 409
        assert "height_cm" in r.json()["detail"]

    def test_theme_and_index(self, client):
        css = client.get("/theme.css")
        assert css.status_code == 200
        assert css.headers["content-type"].startswith("text/css")
        page = client.get("/")
        assert page.status_code == 200
        assert "statbench" in page.text
