from utils.errors import CmScopeError


class OutOfBounds(CmScopeError):
    def __init__(self, addr: int, reason: str = "outside the image"):
        self.addr = addr
        super().__init__(f"cannot decode at 0x{addr:08x}: {reason}")
