from .core import *

__version__ = '0.1.0'
__author__ = 'Zachary Einck <zacharyeinck@gmail.com>'
