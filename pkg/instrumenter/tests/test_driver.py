import subprocess
import sys

import pytest

from instrumenter import ExtractionConfig, InstrumenterError, generate_driver
from instrumenter.cli import instrument

SUBJECT = """\
from enum import Enum


class TelloState(Enum):
    LAND = 0
    TAKEOFF = 1
    LEFT = 2


class Tello_TEST:

    def __init__(self):
        self.current_state = TelloState.LAND
        self.left_frames = 0

    def mp_camera(self):
        if self.left_frames == 10:
            if self.current_state == TelloState.TAKEOFF:
                self.current_state = TelloState.LEFT
"""


def _config(tmp_path, source_text=SUBJECT, **kwargs):
    path = tmp_path / "tello.py"
    path.write_text(source_text, encoding="utf-8")
    defaults = dict(
        source=str(path), class_name="Tello_TEST", method="mp_camera",
        attributes=("current_state", "left_frames"),
        patterns={"current_state": (0,), "left_frames": (0, 10)},
        data=("frame0",),
    )
    defaults.update(kwargs)
    return ExtractionConfig(**defaults)


def _run_driver(tmp_path, config):
    instrument(config, str(tmp_path / "out"))
    return subprocess.run(
        [sys.executable, str(tmp_path / "out" / "tello_driver.py")],
        capture_output=True, text=True, timeout=60)


def test_driver_enumerates_product(tmp_path):
    proc = _run_driver(tmp_path, _config(tmp_path))
    assert proc.returncode == 0, proc.stderr
    lines = proc.stdout.splitlines()
    assert lines[0] == "Exploring tello_transformed.mp_camera__Tello_TEST"
    vectors = [l for l in lines if l.startswith("[(")]
    assert vectors == [
        "[('current_state', 0), ('left_frames', 0)]",
        "[('current_state', 0), ('left_frames', 10)]",
    ]
    assert lines.count("[initialize]") == 2


def test_driver_decodes_initial_state(tmp_path):
    proc = _run_driver(tmp_path, _config(
        tmp_path, patterns={"current_state": (1,), "left_frames": (0,)}))
    lines = proc.stdout.splitlines()
    marker = lines.index("[initialize]")
    assert lines[marker + 1] == "TelloState.TAKEOFF"


def test_driver_multiplies_data_items(tmp_path):
    proc = _run_driver(tmp_path, _config(tmp_path, data=("a", "b", "c")))
    vectors = [l for l in proc.stdout.splitlines() if l.startswith("[(")]
    assert len(vectors) == 2 * 3


def test_zero_data_items_empty_trace(tmp_path):
    proc = _run_driver(tmp_path, _config(tmp_path, data=()))
    assert proc.returncode == 0
    assert proc.stdout == ""
    assert "no data items" in proc.stderr


def test_empty_pattern_list_rejected(tmp_path):
    with pytest.raises(InstrumenterError, match="left_frames"):
        generate_driver(_config(tmp_path, patterns={"current_state": (0,),
                                                    "left_frames": ()}))


def test_more_than_one_extra_parameter_rejected(tmp_path):
    source = SUBJECT.replace("def mp_camera(self):", "def mp_camera(self, a, b):")
    config = _config(tmp_path, source_text=source)
    with pytest.raises(InstrumenterError, match="parameters besides self"):
        generate_driver(config)


def test_data_item_forwarded_to_extra_parameter(tmp_path):
    source = SUBJECT.replace(
        "    def mp_camera(self):\n",
        "    def mp_camera(self, frame):\n        print(frame)\n")
    proc = _run_driver(tmp_path, _config(tmp_path, source_text=source,
                                         data=("img7.png",)))
    assert proc.returncode == 0, proc.stderr
    assert "img7.png" in proc.stdout.splitlines()
