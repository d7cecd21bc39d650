import json

import numpy as np
import pytest

from pursuitviz import VizError, read_report, read_trajectory, sibling_report

HEADER = "t,bug_index,live_group,coord_0,coord_1,l_total,theta_max"

GOOD_CSV = "\n".join([
    "# config_hash=0123456789abcdef",
    HEADER,
    "0.0,0,0,0.1,0.2,3.0,1.0",
    "0.0,1,1,0.5,0.2,3.0,1.0",
    "0.0,2,2,0.3,0.8,3.0,1.0",
    "0.5,0,0,0.2,0.3,2.0,0.8",
    "0.5,1,1,0.4,0.3,2.0,0.8",
    "0.5,2,2,0.3,0.6,2.0,0.8",
]) + "\n"


def write(tmp_path, text, name="trajectory.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestReadTrajectory:
    def test_parses_frames_and_hash(self, tmp_path):
        traj = read_trajectory(write(tmp_path, GOOD_CSV))
        assert traj.config_hash == "0123456789abcdef"
        assert traj.n_frames == 2 and traj.n_bugs == 3 and traj.coord_dim == 2
        assert traj.times.tolist() == [0.0, 0.5]
        assert traj.positions.shape == (2, 3, 2)
        assert traj.l_total.tolist() == [3.0, 2.0]
        assert traj.theta_max.tolist() == [1.0, 0.8]
        assert np.array_equal(traj.groups, [[0, 1, 2], [0, 1, 2]])

    def test_hash_comment_is_optional(self, tmp_path):
        body = GOOD_CSV.split("\n", 1)[1]
        traj = read_trajectory(write(tmp_path, body))
        assert traj.config_hash == ""
        assert traj.n_frames == 2

    def test_live_reps_follow_merges(self, tmp_path):
        text = "\n".join([
            HEADER,
            "0.0,0,0,0.1,0.2,3.0,1.0",
            "0.0,1,0,0.1,0.2,3.0,1.0",
            "0.0,2,2,0.3,0.8,3.0,1.0",
        ]) + "\n"
        traj = read_trajectory(write(tmp_path, text))
        assert traj.live_reps(-1) == [0, 2]

    def test_missing_file(self, tmp_path):
        with pytest.raises(VizError, match="not found"):
            read_trajectory(tmp_path / "nope.csv")

    def test_header_only_is_an_error(self, tmp_path):
        with pytest.raises(VizError, match="no samples"):
            read_trajectory(write(tmp_path, HEADER + "\n"))

    def test_wrong_header_rejected(self, tmp_path):
        bad = GOOD_CSV.replace("live_group", "group")
        with pytest.raises(VizError, match="header"):
            read_trajectory(write(tmp_path, bad))

    def test_no_coordinate_columns_rejected(self, tmp_path):
        text = "t,bug_index,live_group,l_total,theta_max\n0,0,0,1,1\n"
        with pytest.raises(VizError, match="header"):
            read_trajectory(write(tmp_path, text))

    def test_ragged_row_rejected(self, tmp_path):
        bad = GOOD_CSV.replace("0.5,2,2,0.3,0.6,2.0,0.8", "0.5,2,2,0.3")
        with pytest.raises(VizError, match="columns"):
            read_trajectory(write(tmp_path, bad))

    def test_non_numeric_cell_rejected(self, tmp_path):
        bad = GOOD_CSV.replace("0.3,0.8", "x,0.8")
        with pytest.raises(VizError, match="non-numeric"):
            read_trajectory(write(tmp_path, bad))

    def test_partial_frame_rejected(self, tmp_path):
        bad = GOOD_CSV.rsplit("\n", 2)[0] + "\n"
        with pytest.raises(VizError, match="multiple"):
            read_trajectory(write(tmp_path, bad))

    def test_shuffled_bug_order_rejected(self, tmp_path):
        bad = GOOD_CSV.replace("0.5,0,0,0.2,0.3,2.0,0.8",
                               "0.5,1,1,0.2,0.3,2.0,0.8", 1)
        with pytest.raises(VizError, match="cycle"):
            read_trajectory(write(tmp_path, bad))

    def test_time_jump_inside_frame_rejected(self, tmp_path):
        bad = GOOD_CSV.replace("0.5,2,2", "0.6,2,2")
        with pytest.raises(VizError, match="varies"):
            read_trajectory(write(tmp_path, bad))


class TestReadReport:
    def good(self):
        return {
            "scenario": "demo",
            "verdict": "collapsed",
            "space": {"type": "torus", "name": "t", "coord_dim": 2,
                      "injectivity_radius": 0.5},
        }

    def test_round_trip(self, tmp_path):
        p = tmp_path / "report.json"
        p.write_text(json.dumps(self.good()))
        assert read_report(p)["verdict"] == "collapsed"

    def test_missing_file(self, tmp_path):
        with pytest.raises(VizError, match="not found"):
            read_report(tmp_path / "report.json")

    def test_invalid_json(self, tmp_path):
        p = tmp_path / "report.json"
        p.write_text("{")
        with pytest.raises(VizError, match="JSON"):
            read_report(p)

    def test_missing_verdict(self, tmp_path):
        rep = self.good()
        del rep["verdict"]
        p = tmp_path / "report.json"
        p.write_text(json.dumps(rep))
        with pytest.raises(VizError, match="verdict"):
            read_report(p)

    def test_unknown_space_type(self, tmp_path):
        rep = self.good()
        rep["space"]["type"] = "klein_bottle"
        p = tmp_path / "report.json"
        p.write_text(json.dumps(rep))
        with pytest.raises(VizError, match="unknown space type"):
            read_report(p)

    def test_missing_coord_dim(self, tmp_path):
        rep = self.good()
        del rep["space"]["coord_dim"]
        p = tmp_path / "report.json"
        p.write_text(json.dumps(rep))
        with pytest.raises(VizError, match="coord_dim"):
            read_report(p)


def test_sibling_report_discovery(tmp_path):
    traj = tmp_path / "trajectory.csv"
    traj.write_text(GOOD_CSV)
    assert sibling_report(traj) is None
    (tmp_path / "report.json").write_text("{}")
    assert sibling_report(traj) == tmp_path / "report.json"


class TestRealArtifacts:
    def test_trajectory_matches_report(self, torus_run):
        traj = read_trajectory(torus_run / "trajectory.csv")
        rep = read_report(torus_run / "report.json")
        assert traj.coord_dim == rep["space"]["coord_dim"]
        assert traj.n_bugs == rep["n_bugs"]
        assert len(traj.live_reps(-1)) == rep["live_final"]
        assert traj.config_hash == rep["config_hash"]
        assert traj.times[0] == 0.0
        assert np.all(np.diff(traj.times) > 0)

    def test_every_preset_parses(self, run_dirs):
        for name, outdir in run_dirs.items():
            traj = read_trajectory(outdir / "trajectory.csv")
            rep = read_report(outdir / "report.json")
            assert traj.n_frames >= 2, name
            assert rep["space"]["type"] in ("euclidean", "torus", "mobius",
                                            "sphere", "rp2", "dumbbell"), name
