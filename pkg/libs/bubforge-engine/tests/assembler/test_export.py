import json
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from bubforge.engine.assembler.density import density_map
from bubforge.engine.assembler.export import (
    DENSITY_FILE,
    IMAGE_FILE,
    LABELS_FILE,
    META_FILE,
    density_from_file,
    export_scene,
    read_labels,
    scene_dir,
    synthesize_scenes,
)
from bubforge.engine.assembler.labels import LabelSet
from bubforge.engine.assembler.scene import synthesize
from bubforge.engine.errors import FormatError
from bubforge.engine.imgproc.codecs import read_pgm
from bubforge.engine.models.label_mapping import LabelMapping

HEADER = "id,x_px,y_px,z,a_px,b_px,phi_rad,E,circularity,edge_ratio,area_px2,clipped"


def test_exported_files(channel_spec, db_source, tmp_path):
    # ARRANGE
    scene = synthesize(channel_spec, db_source)

    # ACT
    meta = export_scene(scene, tmp_path / "out")

    # ASSERT
    out = tmp_path / "out"
    lines = (out / LABELS_FILE).read_text().splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 1 + channel_spec.count
    assert read_pgm(out / IMAGE_FILE).shape == (120, 160)
    on_disk = json.loads((out / META_FILE).read_text())
    assert on_disk == meta
    assert (meta["seed"], meta["count"], meta["renderer"]) == (11, 12, "gan")
    assert len(meta["bboxes"]) == len(meta["records"]) == 12
    assert meta["void_fraction"] == pytest.approx(scene.void_fraction)


def test_density_file_scale(channel_spec, db_source, tmp_path):
    # ARRANGE
    scene = synthesize(channel_spec, db_source)
    meta = export_scene(scene, tmp_path)

    # ACT
    density = density_from_file(read_pgm(tmp_path / DENSITY_FILE), meta)

    # ASSERT
    expected = density_map(scene.labels, channel_spec)
    assert meta["density_scale"] == pytest.approx(expected.max())
    np.testing.assert_allclose(density, expected, atol=meta["density_scale"] / 255.0)


def test_empty_scene_writes_header_only(channel_spec, db_source, tmp_path):
    scene = synthesize(replace(channel_spec, count=0), db_source)

    meta = export_scene(scene, tmp_path)

    assert (tmp_path / LABELS_FILE).read_text().splitlines() == [HEADER]
    assert meta["density_scale"] == 1.0
    assert len(read_labels(tmp_path)) == 0


def test_labels_read_back(channel_spec, db_source, tmp_path):
    # ARRANGE
    scene = synthesize(channel_spec, db_source)
    export_scene(scene, tmp_path)

    # ACT
    labels = read_labels(tmp_path)

    # ASSERT
    assert labels.seed == 11
    assert labels.spec == channel_spec
    assert labels.extra == {"renderer": "gan"}
    for written, read in zip(scene.labels.labels, labels.labels):
        assert read.id == written.id and read.clipped == written.clipped and read.record == written.record
        assert read.x == pytest.approx(written.x, rel=1e-8)
        assert read.area == pytest.approx(written.area, rel=1e-8)
        assert read.bbox == pytest.approx(written.bbox)


def test_inconsistent_meta_is_rejected(channel_spec, db_source, tmp_path):
    # ARRANGE
    export_scene(synthesize(channel_spec, db_source), tmp_path)
    meta = json.loads((tmp_path / META_FILE).read_text())
    meta["bboxes"] = meta["bboxes"][:3]
    (tmp_path / META_FILE).write_text(json.dumps(meta))

    # ACT / ASSERT
    with pytest.raises(FormatError, match="bounding boxes"):
        read_labels(tmp_path)


def test_missing_label_column(channel_spec, db_source, tmp_path):
    export_scene(synthesize(channel_spec, db_source), tmp_path)
    csv = (tmp_path / LABELS_FILE).read_text().replace("phi_rad", "theta")
    (tmp_path / LABELS_FILE).write_text(csv)

    with pytest.raises(FormatError, match="phi_rad"):
        read_labels(tmp_path)


@pytest.mark.parametrize("ratio", [0.0, 1.5, float("nan")])
def test_aspect_ratio_outside_unit_interval_is_rejected(channel_spec, db_source, tmp_path, ratio):
    # ARRANGE
    export_scene(synthesize(channel_spec, db_source), tmp_path)
    frame = pd.read_csv(tmp_path / LABELS_FILE)
    frame.loc[2, "E"] = ratio
    frame.to_csv(tmp_path / LABELS_FILE, index=False)

    # ACT / ASSERT
    with pytest.raises(FormatError, match=r"label 2: E=.* is outside \(0, 1\]"):
        read_labels(tmp_path)


def test_renamed_columns_round_trip(channel_spec, db_source):
    # ARRANGE
    labels = synthesize(channel_spec, db_source).labels
    mapping = LabelMapping({"aspect_ratio": "ratio", "id": "bubble", "clipped": "cut"})

    # ACT
    frame = labels.to_frame(mapping)
    back = LabelSet.from_frame(frame, channel_spec, labels.seed, mapping=mapping)

    # ASSERT
    assert list(frame.columns) == mapping.columns, "table should use the renamed columns"
    assert frame["bubble"].dtype == "int64" and frame["cut"].dtype == "int64", "id and clipped are integer columns"
    assert [b.aspect_ratio for b in back.labels] == [b.aspect_ratio for b in labels.labels], "ratios survive"
    assert [b.clipped for b in back.labels] == [b.clipped for b in labels.labels], "clipped flags survive"


def test_scene_batches_are_thread_count_independent(channel_spec, db_source, tmp_path):
    # ACT
    serial = synthesize_scenes(channel_spec, db_source, 3, tmp_path / "serial", threads=1)
    parallel = synthesize_scenes(channel_spec, db_source, 3, tmp_path / "parallel", threads=2)

    # ASSERT
    assert [m["seed"] for m in serial] == [11, 12, 13]
    for i in range(3):
        for name in (IMAGE_FILE, LABELS_FILE, DENSITY_FILE, META_FILE):
            a = (scene_dir(tmp_path / "serial", i) / name).read_bytes()
            b = (scene_dir(tmp_path / "parallel", i) / name).read_bytes()
            assert a == b, f"scene {i} {name} differs"
