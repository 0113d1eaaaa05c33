import json

from ._adaptloop import *  # noqa: F401,F403
from ._adaptloop import compare as _compare


def compare_report(config="", ensemble=None, workers=0):
    return json.loads(_compare(config, ensemble, workers))
