import json

import numpy as np
import pytest

from submodsum import BudgetSpec, CoverSpec, DataError, greedy_cover, load_ground_set
from submodsum.io import write_concepts, write_matrix
from submodsum.ground import ConceptTable
from submodsum.objectives import SetCover
from submodsum.pipeline import EmptyQueryError, SummarizationJob, build_objective, run_job
from submodsum.synthetic import generate, generate_synthetic

from instances import K3, U3


@pytest.fixture
def k3_bundle(tmp_path):
    write_matrix(tmp_path / "kernel.bin", K3)
    write_concepts(tmp_path / "concepts.json", ConceptTable(("a", "b", "c"), U3))
    doc = {"version": 1, "kernel": "kernel.bin", "concepts": {"path": "concepts.json"}}
    (tmp_path / "manifest.json").write_text(json.dumps(doc))
    return tmp_path / "manifest.json"


def test_budget_job_on_k3(k3_bundle):
    # float32 storage of the kernel keeps the greedy order
    job = SummarizationJob(str(k3_bundle), "facility_location", budget=BudgetSpec("cardinality", 2))
    sol, report = run_job(job)
    assert sol.order == [0, 2]
    assert report["version"] == 1 and report["selected_ids"] == ["0", "2"]


def test_cover_job_on_k3(k3_bundle):
    job = SummarizationJob(str(k3_bundle), "set_cover", mode="cover", cover=CoverSpec(1.0))
    sol, _ = run_job(job)
    assert sol.order == [0, 1]


def test_query_matching_nothing(k3_bundle, tmp_path):
    (tmp_path / "rel.csv").write_text("0\n0\n0\n")
    job = SummarizationJob(str(k3_bundle), "facility_location", budget=BudgetSpec("cardinality", 1),
                           relevance=str(tmp_path / "rel.csv"))
    with pytest.raises(EmptyQueryError, match="empty query ground set"):
        run_job(job)


def test_query_job_maps_back_to_full_indices(k3_bundle):
    job = SummarizationJob(str(k3_bundle), "facility_location", budget=BudgetSpec("cardinality", 1),
                           query="c")
    sol, report = run_job(job)
    assert sol.order == [1]  # V_q = {1, 2}; item 1 represents both better
    assert report["ground_size"] == 2


def test_job_file_resolves_relative_paths(k3_bundle):
    doc = {"version": 1, "manifest": "manifest.json", "function": "facility_location",
           "budget": {"mode": "cardinality", "budget": 2}, "output": "out.json"}
    path = k3_bundle.parent / "job.json"
    path.write_text(json.dumps(doc))
    run_job(SummarizationJob.load(path))
    assert json.loads((k3_bundle.parent / "out.json").read_text())["order"] == [0, 2]


def test_job_validation():
    with pytest.raises(DataError):
        SummarizationJob("m.json", "facility_location")
    with pytest.raises(DataError):
        SummarizationJob("m.json", "facility_location", budget=BudgetSpec(), query="a", relevance="r")


def test_unknown_function(k3_bundle):
    with pytest.raises(DataError, match="unknown function"):
        build_objective(load_ground_set(k3_bundle), "zeppelin")


def test_importance_mixture(tmp_path):
    manifest, ann = generate_synthetic("clustered_with_outliers", 60, 1, tmp_path)
    job = SummarizationJob(str(manifest), "facility_location", beta=50.0,
                           budget=BudgetSpec("cardinality", 5), annotations=str(tmp_path / "annotations.json"))
    sol, report = run_job(job)
    gs = load_ground_set(manifest)
    top = set(np.argsort(-gs.importance)[:5].tolist())
    assert set(sol.order) == top
    assert {"R", "C", "D", "M"} <= set(report["metrics"])


# synthetic scenarios

def test_synthetic_is_byte_identical(tmp_path):
    generate_synthetic("clustered_with_outliers", 100, 7, tmp_path / "a")
    generate_synthetic("clustered_with_outliers", 100, 7, tmp_path / "b")
    for name in sorted(p.name for p in (tmp_path / "a").iterdir()):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name


def test_synthetic_reload_matches_memory(tmp_path):
    gs, _ = generate("clustered_with_outliers", 50, 3)
    back = load_ground_set(generate_synthetic("clustered_with_outliers", 50, 3, tmp_path)[0])
    np.testing.assert_array_equal(back.modalities["embedding"].values, gs.modalities["embedding"].values)
    np.testing.assert_array_equal(back.concepts.incidence, gs.concepts.incidence)
    np.testing.assert_array_equal(back.importance, gs.importance)


def test_clustered_structure():
    gs, ann = generate("clustered_with_outliers", 100, 7)
    assert len(ann.of_kind("scene")) == 5 and len(ann.of_kind("outlier")) == 10
    assert sum(len(s.members) for s in ann.of_kind("scene")) == 90


def test_concept_grid_cover_picks_m_items():
    m = 12
    gs, _ = generate("concept_grid", m, 0, m=m)
    sol = greedy_cover(SetCover(gs.concepts), spec=CoverSpec(1.0))
    assert len(sol.order) == m


def test_uniform_has_no_outliers():
    _, ann = generate("uniform", 40, 0)
    assert ann.of_kind("outlier") == []


def test_generate_rejects_tiny_n():
    with pytest.raises(ValueError):
        generate("uniform", 5, 0)
