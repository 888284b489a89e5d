from utils.errors import CmScopeError


class ImageError(CmScopeError):
    """Base class for image-level analysis failures."""


class NoViableBase(ImageError):
    pass


class InvalidInitialSp(ImageError):
    def __init__(self, value: int):
        self.value = value
        super().__init__(f"initial SP 0x{value:08x} is not a word-aligned RAM address")


class InvalidResetVector(ImageError):
    def __init__(self, value: int):
        self.value = value
        super().__init__(f"reset vector 0x{value:08x} is not a Thumb pointer into the image")


class TableTruncated(ImageError):
    pass
