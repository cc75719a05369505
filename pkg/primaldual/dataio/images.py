"""Grayscale images: PGM read/write, Pillow ingestion and a synthetic test image."""
import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from primaldual.errors import ConstructionError, ParseError, ShapeError

logger = logging.getLogger(__name__)

MAX_PGM_VALUE = 65535
WRITE_MAXVAL = 255

_TOKEN = re.compile(rb'\s*(?:#[^\n]*\n\s*)*([^\s#]+)')


@dataclass(frozen=True)
class ImageBuffer:
    """Row-major grayscale image, nominally in [0, 1]."""

    height: int
    width: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ConstructionError(f'image dimensions must be positive, got {self.height}x{self.width}')
        pixels = np.array(self.pixels, dtype=float).ravel()
        if pixels.size != self.height * self.width:
            raise ShapeError(f'{pixels.size} pixels for a {self.height}x{self.width} image')
        if not np.all(np.isfinite(pixels)):
            raise ConstructionError('image pixels must be finite')
        pixels.setflags(write=False)
        object.__setattr__(self, 'pixels', pixels)

    def as_array(self):
        return self.pixels.reshape(self.height, self.width)

    def with_pixels(self, pixels):
        return ImageBuffer(self.height, self.width, pixels)


def _read_header(data):
    """Magic, width, height, maxval and the offset of the first payload byte."""
    fields = []
    pos = 0
    for _ in range(4):
        match = _TOKEN.match(data, pos)
        if match is None:
            raise ParseError('truncated PGM header', offset=pos)
        fields.append((match.group(1), match.start(1)))
        pos = match.end(1)

    magic, magic_at = fields[0]
    if magic not in (b'P2', b'P5'):
        raise ParseError(f'unsupported magic number {magic!r}', offset=magic_at)
    values = []
    for token, at in fields[1:]:
        if not token.isdigit():
            raise ParseError(f'expected an integer, got {token!r}', offset=at)
        values.append(int(token))
    width, height, maxval = values
    if width < 1 or height < 1:
        raise ParseError(f'bad dimensions {width}x{height}', offset=fields[1][1])
    if not 1 <= maxval <= MAX_PGM_VALUE:
        raise ParseError(f'maxval {maxval} outside [1, {MAX_PGM_VALUE}]', offset=fields[3][1])
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise ParseError('missing whitespace after maxval', offset=pos)
    return magic, width, height, maxval, pos + 1


def read_pgm(path):
    """Read a P2 or P5 PGM; pixels are divided by maxval."""
    data = Path(path).read_bytes()
    magic, width, height, maxval, start = _read_header(data)
    count = width * height

    if magic == b'P5':
        dtype = np.dtype('>u2') if maxval > 255 else np.dtype('u1')
        needed = count * dtype.itemsize
        available = len(data) - start
        if available < needed:
            raise ParseError(f'payload has {available} bytes, expected {needed}',
                             offset=start + available)
        raw = np.frombuffer(data, dtype=dtype, count=count, offset=start).astype(float)
    else:
        raw = np.empty(count)
        pos = start
        for i in range(count):
            match = _TOKEN.match(data, pos)
            if match is None:
                raise ParseError(f'payload ends after {i} of {count} samples', offset=pos)
            token = match.group(1)
            if not token.isdigit():
                raise ParseError(f'expected a sample, got {token!r}', offset=match.start(1))
            raw[i] = int(token)
            pos = match.end(1)

    if np.any(raw > maxval):
        raise ParseError(f'sample exceeds maxval {maxval}', offset=start)
    return ImageBuffer(height, width, raw / maxval)


def quantize(pixels, maxval=WRITE_MAXVAL):
    """Clip to [0, 1] and round half-up to integer levels."""
    return np.floor(np.clip(pixels, 0.0, 1.0) * maxval + 0.5).astype(np.int64)


def write_pgm(path, image, binary=True):
    """Write with maxval 255; P5 by default, P2 when ``binary`` is false."""
    levels = quantize(image.pixels)
    header = f'{"P5" if binary else "P2"}\n{image.width} {image.height}\n{WRITE_MAXVAL}\n'
    with open(path, 'wb') as f:
        f.write(header.encode('ascii'))
        if binary:
            f.write(levels.astype(np.uint8).tobytes())
        else:
            rows = levels.reshape(image.height, image.width)
            f.write(''.join(' '.join(str(v) for v in row) + '\n' for row in rows).encode('ascii'))


def load_image(path):
    """Load any format Pillow reads, converted to 8-bit grayscale.

    PGM files go through ``read_pgm`` so 16-bit data keeps its precision.
    """
    path = Path(path)
    if path.suffix.lower() == '.pgm':
        return read_pgm(path)
    try:
        with Image.open(path) as image:
            gray = np.asarray(image.convert('L'), dtype=float)
    except OSError as e:
        raise ParseError(f'cannot read image {path}: {e}') from e
    logger.debug(f'loaded {path} as {gray.shape[0]}x{gray.shape[1]} grayscale')
    return ImageBuffer(gray.shape[0], gray.shape[1], gray / 255.0)


def make_piecewise_constant(height, width):
    """Rectangles and a disk on a flat background; levels in [0.1, 0.9]."""
    if height < 2 or width < 2:
        raise ConstructionError(f'synthetic image needs at least 2x2, got {height}x{width}')
    rows, cols = np.mgrid[0:height, 0:width]
    img = np.full((height, width), 0.2)
    img[height // 8:height // 2, width // 8:width // 2] = 0.8
    img[height // 2:7 * height // 8, width // 2:7 * width // 8] = 0.5
    radius = min(height, width) / 6.0
    disk = (rows - 0.7 * height) ** 2 + (cols - 0.25 * width) ** 2 <= radius ** 2
    img[disk] = 0.9
    img[height // 4:height // 3, 5 * width // 8:7 * width // 8] = 0.1
    return ImageBuffer(height, width, img)
