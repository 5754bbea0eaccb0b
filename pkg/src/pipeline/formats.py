"""
On-disk formats.

NCIM (complex image):
    "NCIM" | version u8 | H u32 | W u32 | H*W (re f64, im f64), row-major
NCWT (named float tensors):
    "NCWT" | version u8 | count u32 | per tensor:
    name_len u16 | name utf-8 | ndim u32 | dims u32... | f64 data
Trajectory CSV:
    header "kx,ky", one point per line, 17 significant digits

All integers and floats are little-endian.
"""

import struct
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from src.core.constants import FORMAT_VERSION, IMAGE_MAGIC, TENSOR_MAGIC
from src.core.exceptions import DomainError, FormatError
from src.core.types import ComplexImage, DcWeights, KSpaceSamples, Trajectory
from src.recon.correction import CorrectionKind, CorrectionOp
from src.recon.model import UnrolledModel

PathLike = Union[str, Path]

_IMAGE_HEADER = struct.Struct("<4sBII")
_TENSOR_HEADER = struct.Struct("<4sBI")
_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")

# Model metadata codes stored in meta.kind
KIND_CODES: Tuple[CorrectionKind, ...] = (CorrectionKind.GRADIENT_STEP, CorrectionKind.SMALL_CNN)


class _Reader:
    """Cursor over a byte buffer that reports truncation with its offset."""

    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise FormatError(
                f"truncated {what}: need {size} bytes, {len(self.data) - self.offset} left",
                offset=len(self.data),
            )
        chunk = self.data[self.offset:end]
        self.offset = end
        return chunk

    def unpack(self, fmt: struct.Struct, what: str):
        return fmt.unpack(self.take(fmt.size, what))


def _check_magic(data: bytes, magic: bytes) -> None:
    if data[:4] != magic:
        raise FormatError(f"bad magic {data[:4]!r}, expected {magic!r}", offset=0)


def _check_version(version: int) -> None:
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported version {version}", offset=4)


# ----- complex images -----

def encode_image(img: ComplexImage) -> bytes:
    header = _IMAGE_HEADER.pack(IMAGE_MAGIC, FORMAT_VERSION, img.height, img.width)
    return header + img.data.astype("<c16").tobytes()


def decode_image(data: bytes) -> ComplexImage:
    _check_magic(data, IMAGE_MAGIC)
    reader = _Reader(data)
    _, version, height, width = reader.unpack(_IMAGE_HEADER, "image header")
    _check_version(version)
    if height < 1 or width < 1:
        raise FormatError(f"invalid image size {height}x{width}", offset=5)
    payload = reader.take(16 * height * width, "image data")
    if reader.offset != len(data):
        raise FormatError(f"{len(data) - reader.offset} trailing bytes after image data", offset=reader.offset)
    values = np.frombuffer(payload, dtype="<c16").reshape(height, width)
    return ComplexImage(values.astype(np.complex128))


def write_image(img: ComplexImage, path: PathLike) -> None:
    Path(path).write_bytes(encode_image(img))


def read_image(path: PathLike) -> ComplexImage:
    return decode_image(Path(path).read_bytes())


# ----- named tensors -----

def encode_tensors(tensors: Dict[str, np.ndarray]) -> bytes:
    parts = [_TENSOR_HEADER.pack(TENSOR_MAGIC, FORMAT_VERSION, len(tensors))]
    for name, value in tensors.items():
        value = np.asarray(value, dtype=np.float64)
        encoded = name.encode("utf-8")
        parts.append(_U16.pack(len(encoded)))
        parts.append(encoded)
        parts.append(_U32.pack(value.ndim))
        parts.extend(_U32.pack(dim) for dim in value.shape)
        parts.append(value.astype("<f8").tobytes())
    return b"".join(parts)


def decode_tensors(data: bytes) -> Dict[str, np.ndarray]:
    _check_magic(data, TENSOR_MAGIC)
    reader = _Reader(data)
    _, version, count = reader.unpack(_TENSOR_HEADER, "tensor header")
    _check_version(version)
    tensors: Dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_length,) = reader.unpack(_U16, "tensor name length")
        start = reader.offset
        try:
            name = reader.take(name_length, "tensor name").decode("utf-8")
        except UnicodeDecodeError:
            raise FormatError("tensor name is not valid UTF-8", offset=start) from None
        (ndim,) = reader.unpack(_U32, f"rank of {name}")
        shape = tuple(reader.unpack(_U32, f"dims of {name}")[0] for _ in range(ndim))
        size = int(np.prod(shape)) if shape else 1
        payload = reader.take(8 * size, f"data of {name}")
        tensors[name] = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(shape)
    if reader.offset != len(data):
        raise FormatError(f"{len(data) - reader.offset} trailing bytes after tensors", offset=reader.offset)
    return tensors


def write_tensors(tensors: Dict[str, np.ndarray], path: PathLike) -> None:
    Path(path).write_bytes(encode_tensors(tensors))


def read_tensors(path: PathLike) -> Dict[str, np.ndarray]:
    return decode_tensors(Path(path).read_bytes())


def _require(tensors: Dict[str, np.ndarray], name: str, path: PathLike) -> np.ndarray:
    if name not in tensors:
        raise FormatError(f"{path}: missing tensor {name!r}")
    return tensors[name]


def write_kspace(y: KSpaceSamples, path: PathLike) -> None:
    write_tensors({"y": np.stack([y.values.real, y.values.imag], axis=1)}, path)


def read_kspace(path: PathLike) -> KSpaceSamples:
    values = _require(read_tensors(path), "y", path)
    if values.ndim != 2 or values.shape[1] != 2:
        raise FormatError(f"{path}: tensor 'y' must have shape (M, 2), found {values.shape}")
    return KSpaceSamples(values[:, 0] + 1j * values[:, 1])


def write_weights(d: DcWeights, path: PathLike) -> None:
    write_tensors({"d": d.values}, path)


def read_weights(path: PathLike) -> DcWeights:
    values = _require(read_tensors(path), "d", path)
    if values.ndim != 1:
        raise FormatError(f"{path}: tensor 'd' must be 1D, found {values.shape}")
    return DcWeights(values)


def model_tensors(model: UnrolledModel) -> Dict[str, np.ndarray]:
    tensors = {
        "meta.kind": np.array([KIND_CODES.index(model.kind)], dtype=np.float64),
        "meta.n_iter": np.array([model.n_iter_K], dtype=np.float64),
        "meta.buffer_size": np.array([model.buffer_size_B], dtype=np.float64),
        "meta.filters": np.array([model.filters], dtype=np.float64),
        "meta.use_dc": np.array([1.0 if model.use_dc else 0.0]),
    }
    tensors.update(model.named_parameters())
    return tensors


def model_from_tensors(tensors: Dict[str, np.ndarray], source: Optional[PathLike] = None) -> UnrolledModel:
    source = source or "model"

    def meta(name: str) -> int:
        return int(_require(tensors, f"meta.{name}", source).ravel()[0])

    code = meta("kind")
    if not 0 <= code < len(KIND_CODES):
        raise FormatError(f"{source}: unknown model kind code {code}")
    kind, n_iter, buffer_size, filters = KIND_CODES[code], meta("n_iter"), meta("buffer_size"), meta("filters")
    corrections = []
    for k in range(n_iter):
        prefix = f"corrections.{k}."
        arrays = {name[len(prefix):]: value for name, value in tensors.items() if name.startswith(prefix)}
        corrections.append(CorrectionOp.from_arrays(kind, arrays, buffer_size, filters))
    return UnrolledModel(n_iter, buffer_size, corrections, use_dc=bool(meta("use_dc")))


def write_model(model: UnrolledModel, path: PathLike) -> None:
    write_tensors(model_tensors(model), path)


def read_model(path: PathLike) -> UnrolledModel:
    return model_from_tensors(read_tensors(path), path)


# ----- trajectory CSV -----

def write_trajectory(traj: Trajectory, path: PathLike) -> None:
    frame = pd.DataFrame({"kx": traj.kx, "ky": traj.ky})
    frame.to_csv(path, index=False, float_format="%.17g")


def read_trajectory(path: PathLike) -> Trajectory:
    """
    Read a trajectory CSV.

    Raises:
        FormatError: wrong header or non-numeric values
        DomainError: coordinate outside [-0.5, 0.5), with its line number
    """
    try:
        frame = pd.read_csv(path, dtype=np.float64, float_precision="round_trip")
    except ValueError as exc:
        raise FormatError(f"{path}: non-numeric trajectory value ({exc})") from None
    if list(frame.columns) != ["kx", "ky"]:
        raise FormatError(f"{path}: header must be 'kx,ky', found {','.join(map(str, frame.columns))}")
    points = frame.to_numpy(dtype=np.float64)
    try:
        return Trajectory(points)
    except DomainError as exc:
        line = exc.index + 2
        raise DomainError(
            f"{path}:{line}: coordinate {tuple(points[exc.index])} outside [-0.5, 0.5)",
            index=exc.index,
            line=line,
        ) from None
