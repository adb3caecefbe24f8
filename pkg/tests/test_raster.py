import json

import numpy as np
import pytest

from elss import errors, raster
from elss.raster import (
    ClassMapping,
    CrossValidationPolicy,
    POTSDAM_PROFILE,
    RasterKind,
    cross_validate,
    derive_suitability,
    load_label_raster,
    load_suitability_raster,
    pixel_to_world,
    save_raster,
    world_to_pixel,
)

from conftest import make_labels, make_meta, make_suitability


class TestLoadLabelRaster:
    def test_round_trip(self, tmp_path):
        labels = make_labels(
            [[0, 1, 0, 1]] * 4, classes={0: "background", 1: "building"}
        )
        path = tmp_path / "labels.pgm"
        save_raster(labels, path)
        loaded = load_label_raster(path)
        assert loaded.width == 4 and loaded.height == 4
        assert np.array_equal(loaded.data, labels.data)
        assert loaded.meta == labels.meta

    def test_payload_dimension_mismatch(self, tmp_path):
        path = tmp_path / "bad.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(15))
        sidecar = {
            "format": "ELSSR-1",
            "kind": "labels",
            "width": 4,
            "height": 4,
            "gsd_m_per_px": 0.5,
            "origin": [0, 0],
            "crs": "local-m",
            "classes": {"0": "background"},
        }
        (tmp_path / "bad.pgm.meta.json").write_text(json.dumps(sidecar))
        with pytest.raises(errors.DimensionMismatch):
            load_label_raster(path)

    def test_missing_sidecar(self, tmp_path):
        path = tmp_path / "orphan.pgm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes(4))
        with pytest.raises(errors.MissingSidecar):
            load_label_raster(path)

    def test_rejects_foreign_format_tag(self, tmp_path, write_raster):
        labels = make_labels([[0]], classes={0: "background"})
        path = write_raster("labels.pgm", labels)
        sidecar = path.parent / (path.name + ".meta.json")
        doc = json.loads(sidecar.read_text())
        doc["format"] = "ELSSR-2"
        sidecar.write_text(json.dumps(doc))
        with pytest.raises(errors.MalformedHeader):
            load_label_raster(path)

    def test_rejects_unknown_class_index(self):
        with pytest.raises(errors.UnknownClassIndex):
            make_labels([[0, 7]], classes={0: "background"})

    def test_rejects_non_pgm(self, tmp_path):
        path = tmp_path / "junk.pgm"
        path.write_bytes(b"GIF89a")
        (tmp_path / "junk.pgm.meta.json").write_text(
            json.dumps(
                {
                    "format": "ELSSR-1",
                    "kind": "labels",
                    "width": 1,
                    "height": 1,
                    "gsd_m_per_px": 1,
                    "origin": [0, 0],
                    "crs": "x",
                    "classes": {},
                }
            )
        )
        with pytest.raises(errors.MalformedHeader):
            load_label_raster(path)


class TestDeriveSuitability:
    def test_empty_intersection(self):
        labels = make_labels([[1, 1], [1, 1]], classes={0: "background", 1: "building"})
        out = derive_suitability(labels, ClassMapping(frozenset({"background"})))
        assert not out.data.any()

    def test_full_intersection(self):
        labels = make_labels([[0, 0], [0, 0]], classes={0: "background"})
        out = derive_suitability(labels, ClassMapping(frozenset({"background"})))
        assert out.data.all()

    def test_potsdam_profile(self):
        classes = {0: "impervious", 1: "building", 2: "tree", 3: "background"}
        labels = make_labels([[0, 1], [0, 2]], classes=classes)
        out = derive_suitability(labels, POTSDAM_PROFILE)
        assert out.data.tolist() == [[1, 0], [1, 0]]

    def test_meta_kind_flips_to_suitability(self):
        labels = make_labels([[0]], classes={0: "background"})
        out = derive_suitability(labels, ClassMapping(frozenset({"background"})))
        assert out.meta.kind is RasterKind.suitability

    def test_unresolvable_class_name(self):
        labels = make_labels([[0]], classes={0: "background"})
        with pytest.raises(errors.UnresolvableClassName):
            derive_suitability(labels, ClassMapping(frozenset({"lawn"})))

    def test_idempotent_under_partition_preserving_remap(self):
        classes = {0: "background", 1: "building"}
        labels = make_labels([[0, 1], [1, 0]], classes=classes)
        once = derive_suitability(labels, ClassMapping(frozenset({"background"})))
        relabeled = make_labels(
            once.data, classes={0: "unsuitable", 1: "suitable"}
        )
        twice = derive_suitability(relabeled, ClassMapping(frozenset({"suitable"})))
        assert np.array_equal(once.data, twice.data)


class TestCrossValidate:
    SEG = [[1, 1], [0, 0]]
    MAP = [[1, 0], [1, 0]]

    def _run(self, policy):
        return cross_validate(
            make_suitability(self.SEG), make_suitability(self.MAP), policy
        ).data.tolist()

    def test_intersection(self):
        assert self._run(CrossValidationPolicy.intersection) == [[1, 0], [0, 0]]

    def test_union(self):
        assert self._run(CrossValidationPolicy.union) == [[1, 1], [1, 0]]

    def test_map_priority(self):
        assert self._run(CrossValidationPolicy.map_priority) == [[1, 0], [1, 0]]

    def test_seg_priority(self):
        assert self._run(CrossValidationPolicy.seg_priority) == [[1, 1], [0, 0]]

    @pytest.mark.parametrize("policy", list(CrossValidationPolicy))
    def test_agreement_fixpoint(self, policy):
        rng = np.random.default_rng(7)
        grid = rng.integers(0, 2, size=(9, 11))
        x = make_suitability(grid)
        assert np.array_equal(cross_validate(x, x, policy).data, x.data)

    def test_intersection_union_bounds(self):
        rng = np.random.default_rng(8)
        a = make_suitability(rng.integers(0, 2, size=(12, 12)))
        b = make_suitability(rng.integers(0, 2, size=(12, 12)))
        inter = cross_validate(a, b, CrossValidationPolicy.intersection).data
        union = cross_validate(a, b, CrossValidationPolicy.union).data
        assert (inter <= a.data).all() and (inter <= b.data).all()
        assert (union >= a.data).all() and (union >= b.data).all()

    def test_shape_mismatch(self):
        with pytest.raises(errors.ShapeMismatch):
            cross_validate(
                make_suitability([[1]]),
                make_suitability([[1, 0]]),
                CrossValidationPolicy.intersection,
            )

    def test_gsd_mismatch(self):
        with pytest.raises(errors.ShapeMismatch):
            cross_validate(
                make_suitability([[1]], gsd=0.5),
                make_suitability([[1]], gsd=0.3),
                CrossValidationPolicy.intersection,
            )


class TestCoordinates:
    def test_origin_identity(self):
        meta = make_meta(gsd=0.5, origin=(100.0, 200.0))
        assert pixel_to_world((0, 0), meta, width=8, height=8) == (100.0, 200.0)

    def test_affine(self):
        meta = make_meta(gsd=0.3, origin=(0.0, 0.0))
        wx, wy = pixel_to_world((10, 4), meta, width=16, height=16)
        assert wx == pytest.approx(3.0) and wy == pytest.approx(1.2)

    def test_out_of_bounds(self):
        meta = make_meta()
        with pytest.raises(errors.OutOfBounds):
            pixel_to_world((8, 0), meta, width=8, height=8)

    def test_round_trip_random_pixels(self):
        meta = make_meta(gsd=0.3, origin=(-50.0, 120.0))
        rng = np.random.default_rng(11)
        for _ in range(100):
            p = (int(rng.integers(0, 64)), int(rng.integers(0, 48)))
            w = pixel_to_world(p, meta, width=64, height=48)
            assert world_to_pixel(w, meta, width=64, height=48) == p


class TestSaveRoundTrip:
    def test_suitability_bit_exact(self, tmp_path):
        rng = np.random.default_rng(3)
        original = make_suitability(rng.integers(0, 2, size=(17, 23)), gsd=0.05)
        path = tmp_path / "suit.pgm"
        save_raster(original, path)
        loaded = load_suitability_raster(path)
        assert np.array_equal(loaded.data, original.data)
        assert loaded.meta == original.meta
        assert (loaded.width, loaded.height) == (original.width, original.height)

    def test_suitability_payload_uses_255(self, tmp_path):
        path = tmp_path / "suit.pgm"
        save_raster(make_suitability([[1, 0]]), path)
        assert path.read_bytes().endswith(b"\xff\x00")

    def test_kind_checked_on_load(self, tmp_path, write_raster):
        labels = make_labels([[0]], classes={0: "background"})
        path = write_raster("labels.pgm", labels)
        with pytest.raises(errors.MalformedHeader):
            load_suitability_raster(path)


def test_meta_rejects_nonpositive_gsd():
    with pytest.raises(ValueError):
        raster.RasterMeta(
            gsd=0.0, origin=(0, 0), crs_label="x", kind=RasterKind.suitability
        )
