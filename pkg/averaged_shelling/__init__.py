from .calculator import shellingCalculator
from .sh_config import shellingConfig
from .shelling_results import shellingResults
