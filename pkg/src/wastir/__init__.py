"""wastir: image steganography through exact Haar-wavelet upscaling.

A cover image is upscaled 2x by feeding it through an inverse Haar
transform with a constant false detail coefficient. Payload digits (base
4) are embedded into two samples of every 2x2 block and the fourth sample
absorbs the change, so block sums never move: the receiver extracts the
payload and recovers the original cover bit-for-bit.
"""

from .codec import (
    Block,
    CapacityError,
    KeyStream,
    PayloadError,
    PayloadFrame,
    adjust_block,
    bytes_to_digits,
    capacity_bytes,
    derive_keystream,
    digits_to_bytes,
    embed,
    embed_digit,
    extract,
    extract_frame,
    order_bit,
)
from .haar import (
    AuthenticationError,
    ReconstructionError,
    SubbandSet,
    TranslatedImage,
    forward_haar,
    inverse_haar,
    recover_cover,
    resize_cover,
)
from .metrics import MetricsReport, compute_report, image_fidelity, mse, psnr
from .pixmap import (
    ColorImage,
    GrayImage,
    PixmapError,
    StegoContainer,
    read_auto,
    read_pixmap,
    read_stego,
    write_pixmap,
    write_stego,
)

__version__ = "0.1.0"
