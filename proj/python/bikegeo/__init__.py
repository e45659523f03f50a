from ._bikegeo import *  # noqa: F401,F403
