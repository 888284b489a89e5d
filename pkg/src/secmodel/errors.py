from utils.errors import CmScopeError


class ModelError(CmScopeError):
    """Base class for security-model failures."""


class InvalidConfig(ModelError):
    pass


class UnknownRegister(ModelError):
    def __init__(self, address: int):
        self.address = address
        super().__init__(f"no MPU register at 0x{address:08x}")


class IllegalTransition(ModelError):
    def __init__(self, context, event):
        self.context = context
        self.event = event
        super().__init__(f"{event} is not legal in {context}")
