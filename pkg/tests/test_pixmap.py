import numpy as np
import pytest

from wastir.pixmap import (
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


def random_gray(rng, h=8, w=8):
    return GrayImage(rng.integers(0, 256, (h, w), dtype=np.uint8))


def random_color(rng, h=8, w=8):
    return ColorImage(tuple(random_gray(rng, h, w) for _ in range(3)))


def test_read_p5_single_pixel():
    img = read_pixmap(b"P5 1 1 255 " + bytes([0x64]))
    assert isinstance(img, GrayImage)
    assert (img.width, img.height) == (1, 1)
    assert img.pixels[0, 0] == 100


def test_read_p2_extremes():
    img = read_pixmap(b"P2 2 1 255 0 255")
    assert isinstance(img, GrayImage)
    assert img.pixels.tolist() == [[0, 255]]


def test_comments_skipped_everywhere():
    data = b"P2 # magic\n# full line\n2 1 # dims\n255\n# raster next\n12 34"
    img = read_pixmap(data)
    assert img.pixels.tolist() == [[12, 34]]


def test_write_single_pixel_canonical():
    assert write_pixmap(GrayImage(np.zeros((1, 1), dtype=np.uint8))) == b"P5\n1 1\n255\n\x00"


@pytest.mark.parametrize("ascii_flag", [False, True])
def test_gray_round_trip_random(ascii_flag):
    rng = np.random.default_rng(1)
    for _ in range(20):
        img = random_gray(rng, int(rng.integers(1, 9)), int(rng.integers(1, 9)))
        assert read_pixmap(write_pixmap(img, ascii=ascii_flag)) == img


@pytest.mark.parametrize("ascii_flag", [False, True])
def test_color_round_trip_random(ascii_flag):
    rng = np.random.default_rng(2)
    for _ in range(20):
        img = random_color(rng)
        back = read_pixmap(write_pixmap(img, ascii=ascii_flag))
        assert isinstance(back, ColorImage)
        assert back == img


def test_p6_reserialize_byte_identical():
    rng = np.random.default_rng(3)
    img = random_color(rng)
    blob = write_pixmap(img)
    assert write_pixmap(read_pixmap(blob)) == blob


def test_write_is_canonical_for_equal_images():
    a = GrayImage(np.arange(16, dtype=np.uint8).reshape(4, 4))
    b = GrayImage(np.arange(16).reshape(4, 4))  # different input dtype, same image
    assert a == b
    assert write_pixmap(a) == write_pixmap(b)


def test_low_maxval_accepted_without_scaling():
    img = read_pixmap(b"P2 2 1 15 0 15")
    assert img.pixels.tolist() == [[0, 15]]


@pytest.mark.parametrize(
    "data",
    [
        b"P4 1 1 255 \x00",            # unsupported magic
        b"P7 1 1 255 \x00",
        b"P5 0 1 255 \x00",            # zero dimension
        b"P5 1 0 255 \x00",
        b"P5 2 2 255 \x00\x01\x02",    # truncated raster
        b"P2 2 1 255 7",               # truncated ascii raster
        b"P2 2 1 255 7 999",           # sample above maxval
        b"P5 1 1 65535 \x00\x01",      # 16-bit rejected for covers/secrets
        b"P5 1 1",                     # header ends early
        b"P5 x 1 255 \x00",            # non-numeric dimension
    ],
)
def test_read_pixmap_errors(data):
    with pytest.raises(PixmapError):
        read_pixmap(data)


def test_gray_image_validation():
    with pytest.raises(PixmapError):
        GrayImage(np.zeros((0, 4), dtype=np.uint8))
    with pytest.raises(PixmapError):
        GrayImage(np.array([[300]]))
    with pytest.raises(PixmapError):
        GrayImage(np.array([1, 2, 3]))


def test_stego_bias_arithmetic():
    container = StegoContainer((np.array([[-3, 0], [512, 65023]], dtype=np.int64),))
    blob = write_stego(container)
    raster = blob[blob.index(b"65535\n") + 6 :]
    assert raster[0:2] == b"\x01\xfd"  # -3 stored as 509
    assert raster[2:4] == b"\x02\x00"  # 0 stored as 512
    assert raster[4:6] == b"\x04\x00"  # 512 stored as 1024
    assert raster[6:8] == b"\xff\xff"  # 65023 stored as 65535
    assert read_stego(blob) == container


def test_stego_round_trip_random():
    rng = np.random.default_rng(4)
    for channels in (1, 3):
        for _ in range(10):
            h, w = 2 * int(rng.integers(1, 7)), 2 * int(rng.integers(1, 7))
            planes = tuple(
                rng.integers(-512, 65024, (h, w), dtype=np.int64) for _ in range(channels)
            )
            container = StegoContainer(planes)
            assert read_stego(write_stego(container)) == container


def test_stego_comment_is_written_and_ignored():
    container = StegoContainer((np.zeros((2, 2), dtype=np.int64),))
    blob = write_stego(container)
    assert b"# WASTIR bias=512\n" in blob
    assert read_stego(blob) == container


@pytest.mark.parametrize(
    "data",
    [
        b"P5 2 2 255 " + b"\x00" * 4,          # wrong maxval for a container
        b"P5 3 2 65535 " + b"\x00\x02" * 6,    # odd width
        b"P5 2 2 65535 " + b"\x00" * 7,        # truncated 16-bit raster
        b"P2 2 2 65535 0 0 0 0",               # ascii container not allowed
    ],
)
def test_read_stego_errors(data):
    with pytest.raises(PixmapError):
        read_stego(data)


def test_stego_container_validation():
    with pytest.raises(PixmapError):
        StegoContainer((np.zeros((3, 2), dtype=np.int64),))  # odd height
    with pytest.raises(PixmapError):
        StegoContainer((np.full((2, 2), -513, dtype=np.int64),))
    with pytest.raises(PixmapError):
        StegoContainer((np.full((2, 2), 65024, dtype=np.int64),))
    with pytest.raises(PixmapError):
        StegoContainer(tuple(np.zeros((2, 2), dtype=np.int64) for _ in range(2)))


def test_read_auto_dispatch():
    gray = GrayImage(np.array([[1, 2], [3, 4]], dtype=np.uint8))
    assert read_auto(write_pixmap(gray)) == gray
    container = StegoContainer((np.array([[1, -2], [3, 4]], dtype=np.int64),))
    assert read_auto(write_stego(container)) == container
