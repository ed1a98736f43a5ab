"""placeholder"""
def build():
    raise NotImplementedError
