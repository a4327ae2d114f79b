__version__ = "0.1.0"

from .helpers import *
from .linalg import *
from .model import *
from .dynamics import *
from .analysis import *
from .decoupling import *
from .config import *
from .experiments import *
