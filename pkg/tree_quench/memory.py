from joblib import Memory

from .config import CACHE_DIR

MEMORY = Memory(CACHE_DIR, verbose=0)
MEMORY.reduce_size(bytes_limit="1G")
