from collections.abc import Sequence
from fractions import Fraction

_to_json = {}
_from_json = {}


def converts_to_json(objtype, plural=False):
    def decorator(f):
        _to_json[objtype, plural] = f
        return f

    return decorator


def converts_from_json(objtype, plural=False):
    def decorator(f):
        _from_json[objtype, plural] = f
        return f

    return decorator


def jsonify(obj, *args, **kwargs):
    if obj is None:
        return

    conv = _to_json.get((obj.__class__, False))
    if not conv and isinstance(obj, Sequence):
        if not obj:
            raise ValueError("Cannot determine the type of an empty Collection")
        conv = _to_json.get((obj[0].__class__, True))

    if not conv:
        raise ValueError(
            "Unable to convert object {} - only supports {}".format(
                obj.__class__.__name__,
                ", ".join(
                    cls.__name__ + ("[]" if pl else "") for cls, pl in _to_json.keys()
                ),
            )
        )

    return conv(obj, *args, **kwargs)


def objectify(objtype, data, *args, **kwargs):
    conv = _from_json.get((objtype, kwargs.pop("plural", False)))
    if not conv:
        raise ValueError(
            "Unable to build object {} - only supports {}".format(
                objtype.__name__,
                ", ".join(
                    cls.__name__ + ("[]" if pl else "") for cls, pl in _from_json.keys()
                ),
            )
        )
    return conv(data, *args, **kwargs)


# exact rationals travel as "p/q" strings


@converts_to_json(Fraction)
def fraction_to_json(value):
    return str(value)


@converts_from_json(Fraction)
def json_to_fraction(data):
    if isinstance(data, float):
        raise TypeError("Refusing inexact phase {!r}, use a 'p/q' string".format(data))
    return Fraction(data)
