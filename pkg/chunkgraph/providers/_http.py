import os
import time
import requests

from ..logger import Logger
from ..utils import ProviderError


logger = Logger.load(__name__).logger



class HttpClient(object):
    '''
    Description
    --------------------
    Posts JSON to a model endpoint with per-call retries and exponential
    backoff. Stateless after construction, so one client may serve
    concurrent callers.

    Instance Attributes
    --------------------
    endpoint : str
        base URL without trailing slash
    timeout : float
        per-request timeout in seconds
    max_retries : int
        retries after the first failed attempt
    backoff : float
        first retry waits this many seconds, doubling every retry
    api_key_env : str
        environment variable holding the bearer token, if any
    '''

    def __init__(self, cfg):
        self.endpoint = cfg.endpoint.rstrip('/')
        self.timeout = cfg.timeout
        self.max_retries = cfg.max_retries
        self.backoff = cfg.backoff
        self.api_key_env = cfg.api_key_env


    @property
    def headers(self):
        key = os.environ.get(self.api_key_env) if self.api_key_env else None
        return {'Authorization': f'Bearer {key}'} if key else {}


    def post(self, route, payload):
        url = f'{self.endpoint}/{route}'
        attempts = self.max_retries + 1

        for attempt in range(attempts):
            try:
                response = requests.post(url, json=payload, headers=self.headers, timeout=self.timeout)
                response.raise_for_status()
                return response.json()
            except (requests.RequestException, ValueError) as e:
                if attempt + 1 == attempts:
                    raise ProviderError(f'{url} failed after {attempts} attempt(s): {e}') from e
                wait = self.backoff * 2 ** attempt
                logger.warning(f'{url} attempt {attempt + 1} failed ({e}); retrying in {wait:g}s')
                time.sleep(wait)
