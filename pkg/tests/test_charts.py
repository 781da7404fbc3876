import pandas as pd
import plotly.graph_objects as go
import pytest

from rotorlab.charts import FIGURES


def _synthetic(columns):
    return pd.DataFrame({c: [0.0, 0.0, 1.0, 1.0] for c in columns})


@pytest.mark.parametrize("name", sorted(FIGURES))
def test_builder(name):
    spec = FIGURES[name]
    fig = spec.builder({source: _synthetic(cols) for source, cols in spec.sources.items()})
    assert isinstance(fig, go.Figure)
    assert fig.layout.title.text
    assert fig.layout.xaxis.title.text
    assert len(fig.data) >= 1
    for axis, scale in spec.scales.items():
        assert getattr(fig.layout, f"{axis}axis").type == scale


def test_chern_labels_bands():
    spec = FIGURES["chern"]
    bands = pd.DataFrame({"phi": [0.0, 1.0, 0.0, 1.0], "alpha": [0.0] * 4, "band": [0, 0, 1, 1],
                          "omega": [0.1, 0.2, 3.0, 3.1]})
    chern = pd.DataFrame({"band": [0, 1], "C_lattice": [1, -1]})
    fig = spec.builder({"bands": bands, "chern": chern})
    assert [trace.name for trace in fig.data] == ["band 0 (C=1)", "band 1 (C=-1)"]
