class SgdLabError(Exception):
    pass
