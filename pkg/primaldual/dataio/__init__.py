"""Images, LIBSVM datasets, seeded noise and trace files."""
from primaldual.dataio.images import (
    ImageBuffer,
    load_image,
    make_piecewise_constant,
    quantize,
    read_pgm,
    write_pgm,
)
from primaldual.dataio.libsvm import SparseDataset, map_binary_labels, parse_libsvm, write_libsvm
from primaldual.dataio.noise import add_gaussian_noise, standard_normals, uniforms
from primaldual.dataio.traces import format_value, write_summary, write_trace_csv
