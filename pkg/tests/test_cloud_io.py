import numpy as np
import pytest

import hgresample as hg
from hgresample import CloudFormatError, PointCloud, ValidationError, add_noise
from hgresample.io import load_cloud, save_cloud, save_scores


class TestPointCloud:
    def test_basic_construction(self):
        c = PointCloud(np.zeros((4, 3)), np.array([0, 1, 0, 1]))
        assert len(c) == 4
        assert c.points.dtype == np.float64
        assert c.labels.dtype == np.uint8

    def test_list_input_converted(self):
        c = PointCloud([[1, 2, 3]])
        assert c.points.shape == (1, 3)

    @pytest.mark.parametrize(
        "pts",
        [np.zeros((0, 3)), np.zeros((3, 2)), np.zeros(3), [[1, 2, np.nan]], [[np.inf, 0, 0]]],
    )
    def test_bad_points_rejected(self, pts):
        with pytest.raises(ValidationError):
            PointCloud(pts)

    def test_bad_labels_rejected(self):
        pts = np.zeros((3, 3))
        with pytest.raises(ValidationError):
            PointCloud(pts, np.array([0, 1]))
        with pytest.raises(ValidationError):
            PointCloud(pts, np.array([0, 1, 2]))

    def test_subset_keeps_labels_and_copies(self):
        c = PointCloud(np.arange(12.0).reshape(4, 3), np.array([1, 0, 1, 0]))
        s = c.subset([2, 0])
        assert np.array_equal(s.points, c.points[[2, 0]])
        assert np.array_equal(s.labels, [1, 1])
        s.points[0, 0] = 99.0
        assert c.points[2, 0] != 99.0

    def test_copy_is_independent(self):
        c = PointCloud(np.ones((2, 3)), np.array([0, 1]), name="a")
        d = c.copy()
        d.points += 1
        assert not np.array_equal(c.points, d.points)
        assert d.name == "a"


class TestAddNoise:
    def test_zero_level_identical(self, make_cloud):
        c = make_cloud(50, labels=True)
        out = add_noise(c, 0.0)
        assert out is not c
        assert np.array_equal(out.points, c.points)
        assert np.array_equal(out.labels, c.labels)

    def test_deterministic_per_seed(self, make_cloud):
        c = make_cloud(80)
        a = add_noise(c, 0.1, seed=3)
        b = add_noise(c, 0.1, seed=3)
        d = add_noise(c, 0.1, seed=4)
        assert np.array_equal(a.points, b.points)
        assert not np.array_equal(a.points, d.points)

    def test_level_scales_with_resolution(self, make_cloud):
        c = make_cloud(400)
        res = hg.intrinsic_resolution(c)
        out = add_noise(c, 0.5, seed=1)
        disp = out.points - c.points
        # sample std over 1200 draws should sit close to 0.5 * res
        assert abs(disp.std() - 0.5 * res) < 0.1 * res

    def test_sigma_override(self, make_cloud):
        c = make_cloud(30)
        out = add_noise(c, 123.0, sigma=0.001, seed=0)
        assert np.abs(out.points - c.points).max() < 0.01

    def test_sigma_zero_identical(self, make_cloud):
        c = make_cloud(10)
        assert np.array_equal(add_noise(c, 1.0, sigma=0.0).points, c.points)

    def test_negative_rejected(self, make_cloud):
        c = make_cloud(10)
        with pytest.raises(ValidationError):
            add_noise(c, -0.1)
        with pytest.raises(ValidationError):
            add_noise(c, 0.1, sigma=-1.0)

    def test_labels_preserved(self, make_cloud):
        c = make_cloud(40, labels=True)
        assert np.array_equal(add_noise(c, 0.2).labels, c.labels)


@pytest.mark.parametrize("ext", ["xyz", "csv", "ply"])
@pytest.mark.parametrize("with_labels", [False, True])
class TestRoundTrip:
    def test_exact_roundtrip(self, tmp_path, make_cloud, ext, with_labels):
        c = make_cloud(64, seed=5, scale=123.456, labels=with_labels)
        path = tmp_path / f"c.{ext}"
        save_cloud(c, str(path))
        back = load_cloud(str(path))
        assert np.array_equal(back.points, c.points)
        if with_labels:
            assert np.array_equal(back.labels, c.labels)
        else:
            assert back.labels is None
        assert back.name == "c"


class TestFormats:
    def test_explicit_format_overrides_extension(self, tmp_path, make_cloud):
        c = make_cloud(8)
        path = tmp_path / "cloud.dat"
        save_cloud(c, str(path), format="xyz")
        back = load_cloud(str(path), format="xyz")
        assert np.array_equal(back.points, c.points)

    def test_unknown_extension_rejected(self, tmp_path, make_cloud):
        with pytest.raises(ValidationError):
            save_cloud(make_cloud(2), str(tmp_path / "c.bin"))
        with pytest.raises(ValidationError):
            load_cloud(str(tmp_path / "c.bin"))

    def test_xyz_comments_and_blanks(self, tmp_path):
        p = tmp_path / "c.xyz"
        p.write_text("# header\n\n1 2 3\n4 5 6 1\n")
        with pytest.raises(CloudFormatError, match="expected 3 columns"):
            load_cloud(str(p))
        p.write_text("# header\n\n1 2 3 0\n4 5 6 1\n")
        c = load_cloud(str(p))
        assert np.array_equal(c.labels, [0, 1])

    def test_xyz_bad_coordinate_reports_line(self, tmp_path):
        p = tmp_path / "c.xyz"
        p.write_text("1 2 3\n1 x 3\n")
        with pytest.raises(CloudFormatError, match=r"c\.xyz:2"):
            load_cloud(str(p))

    def test_csv_extra_columns_ignored(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("id,x,y,z,extra,edge\n7,1,2,3,foo,1\n8,4,5,6,bar,0\n")
        c = load_cloud(str(p))
        assert np.array_equal(c.points, [[1, 2, 3], [4, 5, 6]])
        assert np.array_equal(c.labels, [1, 0])

    def test_csv_missing_xyz_header(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(CloudFormatError, match="x,y,z"):
            load_cloud(str(p))

    def test_csv_empty_file(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("")
        with pytest.raises(CloudFormatError, match="empty"):
            load_cloud(str(p))

    def test_bad_label_value(self, tmp_path):
        p = tmp_path / "c.xyz"
        p.write_text("1 2 3 2\n")
        with pytest.raises(CloudFormatError, match="label"):
            load_cloud(str(p))

    def test_ply_missing_magic(self, tmp_path):
        p = tmp_path / "c.ply"
        p.write_text("nope\n")
        with pytest.raises(CloudFormatError, match="magic"):
            load_cloud(str(p))

    def test_ply_binary_format_rejected(self, tmp_path):
        p = tmp_path / "c.ply"
        p.write_text(
            "ply\nformat binary_little_endian 1.0\nelement vertex 1\n"
            "property float x\nproperty float y\nproperty float z\n"
            "end_header\n"
        )
        with pytest.raises(CloudFormatError, match="unsupported format"):
            load_cloud(str(p))

    def test_ply_truncated_vertices(self, tmp_path):
        p = tmp_path / "c.ply"
        p.write_text(
            "ply\nformat ascii 1.0\nelement vertex 2\n"
            "property float x\nproperty float y\nproperty float z\n"
            "end_header\n1 2 3\n"
        )
        with pytest.raises(CloudFormatError, match="expected 2 vertices"):
            load_cloud(str(p))

    def test_ply_list_property_rejected(self, tmp_path):
        p = tmp_path / "c.ply"
        p.write_text(
            "ply\nformat ascii 1.0\nelement vertex 1\n"
            "property list uchar int vertex_indices\nend_header\n"
        )
        with pytest.raises(CloudFormatError, match="list"):
            load_cloud(str(p))

    def test_ply_property_order_respected(self, tmp_path):
        p = tmp_path / "c.ply"
        p.write_text(
            "ply\nformat ascii 1.0\ncomment scrambled\nelement vertex 1\n"
            "property float z\nproperty float x\nproperty uchar edge\n"
            "property float y\nend_header\n3 1 1 2\n"
        )
        c = load_cloud(str(p))
        assert np.array_equal(c.points, [[1, 2, 3]])
        assert np.array_equal(c.labels, [1])


def test_save_scores_format(tmp_path):
    path = tmp_path / "s.csv"
    save_scores(str(path), np.array([0.5, 1.25]))
    assert path.read_text() == "index,score\n0,0.5\n1,1.25\n"
