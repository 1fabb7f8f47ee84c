import socket
import subprocess
import sys
import time
from pathlib import Path

import httpx
import pytest

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "chromadiff" / "data"
DATASET_DIR = DATA_DIR / "datasets"
DEMO_IMAGE = DATA_DIR / "palette_demo.png"
REFERENCE_TABLE = DATA_DIR / "reference_distances.csv"
DEFAULT_DATASET = DATASET_DIR / "pairs_default.csv"


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class ServeProcess:
    """A `chromadiff serve` subprocess bound to a scratch data directory."""

    def __init__(self, data_dir: Path, dataset_dir: Path | None = None, port: int | None = None):
        self.port = port or free_port()
        self.data_dir = Path(data_dir)
        self.dataset_dir = Path(dataset_dir) if dataset_dir else DATASET_DIR
        self.base_url = f"http://127.0.0.1:{self.port}"
        self.proc: subprocess.Popen | None = None

    def start(self, timeout: float = 20.0) -> "ServeProcess":
        self.proc = subprocess.Popen(
            [sys.executable, "-m", "chromadiff.cli", "serve",
             "--addr", f"127.0.0.1:{self.port}",
             "--data-dir", str(self.data_dir),
             "--datasets", str(self.dataset_dir)],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE,
        )
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            if self.proc.poll() is not None:
                raise RuntimeError(
                    f"serve exited early: {self.proc.stderr.read().decode()[-1000:]}"
                )
            try:
                httpx.get(self.base_url + "/api/dataset",
                          params={"dataset": "pairs_default"}, timeout=1.0)
                return self
            except httpx.TransportError:
                time.sleep(0.1)
        raise RuntimeError("serve did not become ready in time")

    def kill(self):
        if self.proc and self.proc.poll() is None:
            self.proc.kill()
            self.proc.wait(timeout=10)

    def stop(self):
        if self.proc and self.proc.poll() is None:
            self.proc.terminate()
            try:
                self.proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait(timeout=10)


@pytest.fixture
def serve_process(tmp_path):
    server = ServeProcess(tmp_path / "survey-data").start()
    yield server
    server.stop()
