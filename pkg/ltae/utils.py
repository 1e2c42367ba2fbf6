import sys
import csv
import json
import hashlib

from ltae import settings
from ltae.nn.base import TrainingError, DegenerateBatchError, NonInvertibleError


class SkipModel(Exception):
    """Exception that is raised to signal that a preset should skip the
    model it was training"""


def canonical_json(obj):
    """
    Serialize to the canonical JSON form: sorted keys, compact separators.

    >>> canonical_json({'b': 1, 'a': [1.5, None]})
    '{"a":[1.5,null],"b":1}'
    """
    return json.dumps(obj, sort_keys=True, separators=(',', ':'), allow_nan=False)


def write_json(path, obj):
    """Write `obj` as indented, key-sorted JSON; returns the path"""
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump(obj, fh, sort_keys=True, indent=2, allow_nan=False)
        fh.write('\n')
    return path


def read_json(path):
    with open(path, 'r', encoding='utf-8') as fh:
        return json.load(fh)


def write_csv(path, header, rows):
    """Write a header line and rows; floats use repr so they round-trip"""
    with open(path, 'w', newline='', encoding='utf-8') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return path


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()


def call_with_error_handling(callback, args, kwargs, model_name,
                             exceptions_to_handle=(TrainingError,
                                                   DegenerateBatchError,
                                                   NonInvertibleError)):
    """Run a model stage under settings.error_handler; raises SkipModel
    when the handler asks to skip"""
    if settings.error_handler is None:
        return callback(*args, **kwargs)
    else:
        try:
            return callback(*args, **kwargs)
        except exceptions_to_handle:
            dummy1, ex, traceback = sys.exc_info()
            if settings.error_handler.handle_error(model_name, ex, traceback):
                raise SkipModel(model_name)
            else:
                raise
