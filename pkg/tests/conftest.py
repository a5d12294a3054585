import numpy as np
import pytest

from embolt import model, samplers, topology

# per-class row counts of the digit-scan corpus, classes 0..9
DIGIT_TRAIN_COUNTS = [376, 389, 380, 389, 387, 376, 377, 387, 380, 382]
DIGIT_TEST_COUNTS = [178, 182, 177, 183, 181, 182, 181, 179, 174, 180]


def _write_digit_file(path, counts, seed):
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(10), counts)
    rng.shuffle(labels)
    lines = []
    for lab in labels:
        pixels = rng.integers(0, 17, size=64)
        lines.append(",".join(str(int(v)) for v in pixels) + f",{int(lab)}")
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture(scope="session")
def digit_files(tmp_path_factory):
    """Synthetic digit-scan files in the 64-pixels-plus-label format."""
    root = tmp_path_factory.mktemp("digits")
    train = root / "digits.tra"
    test = root / "digits.tes"
    _write_digit_file(train, DIGIT_TRAIN_COUNTS, seed=20240501)
    _write_digit_file(test, DIGIT_TEST_COUNTS, seed=20240502)
    return train, test


@pytest.fixture(scope="session")
def warm_sa():
    """Compile the annealing kernel once so timed tests measure sampling."""
    g = topology.complete_graph(2)
    m = model.IsingModel(g, h=[0.0, 0.0], J=[0.5])
    cfg = samplers.SamplerConfig(kind="sa", t_max=10, n_samples=1, seed=0)
    samplers.sa_sample(m, cfg)
    return True
