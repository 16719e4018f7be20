import numpy as np

from pqcsim.figures import rpa_figure, save_figure, spectrum_figure, sweep_figure
from pqcsim.grover import run_pqc_grover, sweep_tradeoff
from pqcsim.registers import RegisterLayout


def test_spectrum_figure_saves(tmp_path):
    _, report = run_pqc_grover(RegisterLayout(n1=2, n2=2), 5)
    path = tmp_path / "spectrum.png"
    save_figure(spectrum_figure(report.spectrum, title="search"), path)
    assert path.stat().st_size > 1000


def test_sweep_figure_saves(tmp_path):
    path = tmp_path / "sweep.png"
    save_figure(sweep_figure(sweep_tradeoff(8)), path)
    assert path.stat().st_size > 1000


def test_rpa_figure_saves(tmp_path):
    path = tmp_path / "rpa.png"
    counts = np.array([5, 80, 3, 2, 4, 6, 0, 0])
    save_figure(rpa_figure(counts, marked=1), path)
    assert path.stat().st_size > 1000
