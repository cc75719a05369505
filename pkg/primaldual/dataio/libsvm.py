"""LIBSVM sparse text format: ``label idx:val idx:val ...`` with 1-based indices."""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import sparse

from primaldual.errors import DataError, ParseError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SparseDataset:
    """N rows of n features in CSR form with one label per row; indices are 0-based."""

    features: sparse.csr_matrix
    labels: np.ndarray

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]


def _parse_number(token, line_no, what):
    try:
        return float(token)
    except ValueError:
        raise ParseError(f'non-numeric {what} {token!r}', line=line_no) from None


def map_binary_labels(labels):
    """Two distinct labels become -1 (smaller) and +1 (larger); otherwise unchanged."""
    classes = np.unique(labels)
    if classes.size != 2:
        return labels
    return np.where(labels == classes[0], -1.0, 1.0)


def parse_libsvm(path, n_hint: Optional[int] = None):
    """Read a LIBSVM file into a SparseDataset.

    n is the largest index seen, or ``n_hint`` when given. Blank lines
    and ``#`` comments are skipped.
    """
    labels, indptr, indices, values = [], [0], [], []
    max_index = 0
    with open(Path(path), 'r', encoding='ascii') as f:
        for line_no, line in enumerate(f, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            labels.append(_parse_number(tokens[0], line_no, 'label'))
            last = 0
            for token in tokens[1:]:
                index_text, sep, value_text = token.partition(':')
                if not sep or not index_text.isdigit():
                    raise ParseError(f'malformed feature {token!r}', line=line_no)
                index = int(index_text)
                if index <= last:
                    raise ParseError(f'feature index {index} not increasing', line=line_no)
                indices.append(index - 1)
                values.append(_parse_number(value_text, line_no, 'value'))
                last = index
            max_index = max(max_index, last)
            indptr.append(len(indices))

    if not labels:
        raise DataError(f'{path} contains no rows')
    n = max_index if n_hint is None else int(n_hint)
    if n < max_index:
        raise DataError(f'n_hint={n} is smaller than the largest index {max_index}')
    if n < 1:
        raise DataError(f'{path} has no features and no n_hint')

    features = sparse.csr_matrix(
        (np.asarray(values, dtype=float), np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
        shape=(len(labels), n))
    dataset = SparseDataset(features=features, labels=map_binary_labels(np.asarray(labels)))
    logger.info(f'parsed {path}: N={dataset.n_samples}, n={dataset.n_features}')
    return dataset


def write_libsvm(path, dataset):
    """Write rows with 17 significant digits so a re-parse is exact."""
    csr = dataset.features.tocsr()
    with open(Path(path), 'w', encoding='ascii', newline='\n') as f:
        for row, label in enumerate(dataset.labels):
            start, end = csr.indptr[row], csr.indptr[row + 1]
            pairs = ' '.join(f'{j + 1}:{v:.17g}'
                             for j, v in zip(csr.indices[start:end], csr.data[start:end]))
            f.write(f'{label:.17g} {pairs}'.rstrip() + '\n')
