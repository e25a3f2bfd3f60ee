import datetime
import functools
import logging
import os
import sys
import time

from .utils import elapsed_time


PACKAGE = 'chunkgraph'


#╭-------------------------------------------------------------------------╮
#| Classes                                                                 |
#╰-------------------------------------------------------------------------╯

class CustomLogFormatter(logging.Formatter):
    ''' the default implementation of logging.Formatter cannot render milliseconds inside a strftime pattern '''

    converter = datetime.datetime.fromtimestamp

    def formatTime(self, record, datefmt=None):
        if datefmt is not None: raise TypeError('datefmt argument must be None')
        return self.converter(record.created).strftime('%Y-%m-%d %H:%M:%S.{}').format('%03d' % record.msecs)



class Logger(object):
    '''
    Description
    --------------------
    Cached wrapper around logging.Logger. Handlers are only attached when asked
    for, so module loggers stay silent and propagate to the package logger,
    which the command line configures.

    Class Attributes
    --------------------
    instances : dict
        Logger objects keyed by name

    Instance Attributes
    --------------------
    name : str
        logger name
    file : str | None
        log file path if a folder was given
    logger : logging.Logger
        underlying logger
    '''

    #╭-------------------------------------------------------------------------╮
    #| Class Attributes                                                        |
    #╰-------------------------------------------------------------------------╯

    instances = {}


    #╭-------------------------------------------------------------------------╮
    #| Class Methods                                                           |
    #╰-------------------------------------------------------------------------╯

    @classmethod
    def load(cls, name, *args, **kwargs):
        if name not in cls.instances:
            cls.instances[name] = cls(name, *args, **kwargs)
        return cls.instances[name]


    #╭-------------------------------------------------------------------------╮
    #| Initialize Instance                                                     |
    #╰-------------------------------------------------------------------------╯

    def __init__(self, name, folder=None, clear=False, stream_handler=False, level=logging.INFO):
        self.name = name
        self.file = None

        logger = logging.getLogger(name)
        logger.setLevel(logging.DEBUG)

        # https://docs.python.org/3/library/logging.html#logrecord-attributes
        formatter = CustomLogFormatter(fmt='%(asctime)s %(levelname)s %(name)s %(message)s')

        if folder is not None:
            os.makedirs(folder, exist_ok=True)
            self.file = os.path.join(folder, f'{name}.log')
            if clear: self.clear()
            fh = logging.FileHandler(self.file, encoding='utf-8')
            fh.setLevel(logging.DEBUG)
            fh.setFormatter(formatter)
            logger.addHandler(fh)

        if stream_handler:
            ch = logging.StreamHandler(sys.stderr)
            ch.setLevel(level)
            ch.setFormatter(formatter)
            logger.addHandler(ch)

        self.logger = logger


    #╭-------------------------------------------------------------------------╮
    #| Magic Methods                                                           |
    #╰-------------------------------------------------------------------------╯

    def __repr__(self):
        return f'Logger({self.name!r}, file={self.file!r})'

    def __str__(self):
        return self.file or self.name

    def clear(self):
        if self.file is not None:
            open(self.file, 'w').close()



#╭-------------------------------------------------------------------------╮
#| Functions                                                               |
#╰-------------------------------------------------------------------------╯

def configure(folder=None, verbose=False):
    ''' attaches handlers to the package logger; later calls are no-ops '''
    if PACKAGE in Logger.instances:
        return Logger.instances[PACKAGE]
    level = logging.INFO if verbose else logging.WARNING
    return Logger.load(PACKAGE, folder=folder, stream_handler=True, level=level)


def log(logger=None):
    ''' Logs start and completion of the decorated function using the passed
    logging.Logger object. If None, the logger of the function's module is used.
    Exceptions are logged with their traceback and re-raised. '''

    def decorator(func):

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            nonlocal logger
            logger = logger or Logger.load(func.__module__).logger
            logger.info(f'{func.__name__} start')
            start_time = time.time()

            try:
                out = func(*args, **kwargs)
            except Exception:
                logger.exception(f'{func.__name__} failed')
                raise

            logger.info(f'{func.__name__} complete in {elapsed_time(time.time() - start_time)}')
            return out

        return wrapper

    return decorator
