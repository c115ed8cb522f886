from .encoder import Encoder
from .server import create_app, main

__version__ = "0.1.0"
