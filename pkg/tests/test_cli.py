import json
import subprocess
import sys

import numpy as np
import pytest
from PIL import Image

from wiou.benchmark import build_dataset
from wiou.cli import main
from wiou.labels import LabelMap
from wiou.metrics import evaluate_pair
from wiou.pngio import KITTI_PALETTE, decode_label_image, encode_label_image


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    return build_dataset(tmp_path_factory.mktemp("ds") / "data", seed=0)


def tree_bytes(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_eval_self_comparison(dataset, capsys):
    gt = str(dataset / "scene01/variant05/gt.png")
    assert main(["eval", "--gt", gt, "--pred", gt]) == 0
    line = capsys.readouterr().out.strip()
    assert line == "mIoU=1 mwIoU[a=1]=1 edgeF1=1"


def test_eval_json_matches_library(dataset, tmp_path, capsys):
    d = dataset / "scene02/variant03"
    out = tmp_path / "r.json"
    args = ["eval", "--gt", str(d / "gt.png"), "--pred", str(d / "pred.png"),
            "--alpha", "0.1", "--alpha", "10", "--theta", "2", "--out", str(out)]
    assert main(args) == 0
    gt = decode_label_image((d / "gt.png").read_bytes(), KITTI_PALETTE)
    pred = decode_label_image((d / "pred.png").read_bytes(), KITTI_PALETTE)
    rep = evaluate_pair(gt, pred, (0.1, 10), 2, class_names=KITTI_PALETTE.names)
    assert out.read_text() == rep.to_json()
    assert capsys.readouterr().out.strip() == rep.summary_line()


def test_eval_csv(dataset, tmp_path):
    d = dataset / "scene01/variant00"
    out = tmp_path / "r.csv"
    assert main(["eval", "--gt", str(d / "gt.png"), "--pred", str(d / "pred.png"),
                 "--format", "csv", "--norm", "linf", "--connectivity", "8", "--out", str(out)]) == 0
    assert out.read_text().startswith("class,name,alpha,wiou,iou")


def test_eval_dimension_mismatch(tmp_path, capsys):
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    a.write_bytes(encode_label_image(LabelMap(np.zeros((4, 6), int), 7), KITTI_PALETTE))
    b.write_bytes(encode_label_image(LabelMap(np.zeros((5, 6), int), 7), KITTI_PALETTE))
    assert main(["eval", "--gt", str(a), "--pred", str(b)]) == 2
    err = capsys.readouterr().err
    assert "6x4" in err and "6x5" in err and len(err.strip().splitlines()) == 1


def test_eval_missing_file(tmp_path, capsys):
    assert main(["eval", "--gt", str(tmp_path / "nope.png"), "--pred", str(tmp_path / "x.png")]) == 1
    assert "nope.png" in capsys.readouterr().err


def test_eval_corrupt_file(tmp_path, capsys):
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"garbage")
    assert main(["eval", "--gt", str(bad), "--pred", str(bad)]) == 1
    assert "bad.png" in capsys.readouterr().err


def test_eval_unknown_color(tmp_path, capsys):
    p = tmp_path / "odd.png"
    Image.fromarray(np.full((2, 2, 3), 7, np.uint8)).save(p)
    assert main(["eval", "--gt", str(p), "--pred", str(p)]) == 2
    assert "odd.png" in capsys.readouterr().err


def test_eval_custom_palette(tmp_path, capsys):
    pal = tmp_path / "pal.json"
    pal.write_text(json.dumps([{"id": 0, "name": "a", "rgb": [0, 0, 0]},
                               {"id": 1, "name": "b", "rgb": [255, 255, 255]}]))
    img = tmp_path / "m.png"
    Image.fromarray(np.array([[0, 255], [255, 255]], np.uint8)).convert("RGB").save(img)
    assert main(["eval", "--gt", str(img), "--pred", str(img), "--palette", str(pal)]) == 0
    pal.write_text("[1, 2]")
    assert main(["eval", "--gt", str(img), "--pred", str(img), "--palette", str(pal)]) == 2


@pytest.mark.parametrize("flag", [["--alpha", "0"], ["--alpha", "-2"], ["--theta", "-1"],
                                  ["--norm", "l3"], ["--connectivity", "6"]])
def test_bad_arguments_exit_2(dataset, flag):
    gt = str(dataset / "scene01/variant05/gt.png")
    with pytest.raises(SystemExit) as e:
        main(["eval", "--gt", gt, "--pred", gt, *flag])
    assert e.value.code == 2


def test_weights_outputs(dataset, tmp_path):
    gt = str(dataset / "scene03/variant05/gt.png")
    alphas = ["0.01", "0.1", "1", "10", "100"]
    argv = ["weights", "--gt", gt, "--out", str(tmp_path)]
    for a in alphas:
        argv += ["--alpha", a]
    assert main(argv) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == sorted(f"weights_a{a}.png" for a in alphas)
    low = np.asarray(Image.open(tmp_path / "weights_a0.01.png"))
    assert low.min() >= 252
    high = np.asarray(Image.open(tmp_path / "weights_a100.png"))
    assert high.mean() < low.mean()


def test_gen_dataset_deterministic(tmp_path, capsys):
    for name, seed in (("a", "7"), ("b", "7"), ("c", "8")):
        assert main(["gen-dataset", "--out", str(tmp_path / name), "--seed", seed]) == 0
    a, b, c = (tree_bytes(tmp_path / n) for n in "abc")
    assert a == b
    assert len([k for k in a if k.endswith("pred.png")]) == 33
    assert all(a[k] == c[k] for k in a if k.endswith("gt.png"))
    assert any(a[k] != c[k] for k in a if k.endswith("pred.png"))


def test_benchmark_deterministic(dataset, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("WIOU_THREADS", "1")
    assert main(["benchmark", "--dataset", str(dataset), "--out", str(tmp_path / "r1")]) == 0
    monkeypatch.setenv("WIOU_THREADS", "0")
    assert main(["benchmark", "--dataset", str(dataset), "--out", str(tmp_path / "r2")]) == 0
    r1, r2 = tree_bytes(tmp_path / "r1"), tree_bytes(tmp_path / "r2")
    assert r1 == r2 and set(r1) == {"comparison.json", "per_image.csv", "triplet.csv"}
    d = json.loads(r1["comparison.json"])
    assert len(d["correlation"]) == 7 and all(len(r) == 7 for r in d["correlation"])
    idx = {k: i for i, k in enumerate(d["labels"])}
    corr, diff = d["correlation"], d["mean_abs_diff"]
    assert corr[idx["wIoU@0.01"]][idx["IoU"]] > corr[idx["wIoU@100"]][idx["IoU"]]
    assert diff[idx["wIoU@100"]][idx["edgeF1"]] < diff[idx["wIoU@0.01"]][idx["edgeF1"]]
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 66 and lines[0].startswith("scene01/erode5 mIoU=")


def test_benchmark_generate(tmp_path, capsys):
    ds = tmp_path / "gen"
    assert main(["benchmark", "--dataset", str(ds), "--generate", "--seed", "3",
                 "--alpha", "1", "--error-count", "0", "--out", str(tmp_path / "r")]) == 0
    assert (ds / "manifest.json").exists()
    assert not (tmp_path / "r" / "triplet.csv").exists()


def test_benchmark_missing_dataset(tmp_path, capsys):
    assert main(["benchmark", "--dataset", str(tmp_path / "none"), "--out", str(tmp_path / "r")]) == 1
    assert "none" in capsys.readouterr().err


def test_bad_thread_setting(dataset, tmp_path, monkeypatch):
    monkeypatch.setenv("WIOU_THREADS", "many")
    assert main(["benchmark", "--dataset", str(dataset), "--out", str(tmp_path / "r")]) == 2


def test_module_entry_point(dataset):
    gt = str(dataset / "scene01/variant05/gt.png")
    r = subprocess.run([sys.executable, "-m", "wiou", "eval", "--gt", gt, "--pred", gt],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and r.stdout.startswith("mIoU=1 ")
