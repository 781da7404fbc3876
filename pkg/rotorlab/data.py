import hashlib
import os
from pathlib import Path

import numpy as np
import pandas as pd

from rotorlab.errors import DataError


def series_frame(t, **columns):
    """
    Собирает временной ряд наблюдаемых в DataFrame.
    :param t: номера ударов
    :param columns: наблюдаемые одинаковой длины
    :return: DataFrame с колонкой t и наблюдаемыми
    """
    df = pd.DataFrame({"t": np.asarray(t, dtype=np.int64)})
    for name, values in columns.items():
        df[name] = np.asarray(values)
    return df


def frame_bytes(df):
    # repr floats, fixed line ending: identical runs give identical bytes
    return df.to_csv(index=False, lineterminator="\n").encode("utf-8")


def sha256_hex(payload):
    return hashlib.sha256(payload).hexdigest()


def write_bytes_atomic(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


def write_frame(df, path):
    """Write ``df`` as CSV and return the sha256 of the written bytes."""
    payload = frame_bytes(df)
    write_bytes_atomic(path, payload)
    return sha256_hex(payload)


def load_frame(path):
    path = Path(path)
    try:
        return pd.read_csv(path, float_precision="round_trip")
    except FileNotFoundError:
        raise DataError(f"series file not found: {path}", series=path.stem)


def distribution_frame(m, prob):
    return pd.DataFrame({"m": np.asarray(m, dtype=np.int64), "prob": np.asarray(prob, dtype=float)})


def amplitude_frame(m, amplitudes):
    amplitudes = np.asarray(amplitudes)
    return pd.DataFrame({"m": np.asarray(m, dtype=np.int64), "re": amplitudes.real, "im": amplitudes.imag})

