#!/usr/bin/env python3.7
# -*- coding: utf-8 -*-
import orjson as json
import warnings
from deepdiff import DeepDiff
from enum import Enum, EnumMeta
from inflection import underscore
from inspect import signature
from typing import Any, Dict, List, Optional, Type, TypeVar, Union

import numpy as np

# python keywords and builtins that can not be used as constructor arguments as is
reserved = ('type', 'id', 'list', 'from', 'map', 'min', 'max', 'range')
SerializableType = TypeVar('SerializableType', bound='Serializable')

dump_options = json.OPT_SORT_KEYS | json.OPT_INDENT_2 | json.OPT_SERIALIZE_NUMPY
# models are equal up to this many significant digits of every float
EQ_DIGITS = 12


def make_key(key: str) -> str:
    key = underscore(key)
    return f'{key}_' if key in reserved else key


def dumps(data: Any) -> bytes:
    """
    Canonical JSON encoding used for every file the package writes: sorted keys, shortest round-trip floats
    :param data: JSON-like data or a Serializable
    :return: encoded bytes terminated with a newline
    """
    if isinstance(data, Serializable):
        data = data.to_json()
    return json.dumps(data, option=dump_options) + b"\n"


def loads(raw: Union[bytes, str]) -> Any:
    return json.loads(raw)


def to_plain(obj: Any, keep_null: bool = False) -> Any:
    """
    Recursively converts models, enums and numpy values into JSON-like data
    Attributes starting with underscore are caches rebuilt on load and never written
    """
    def keep(value: Any) -> bool:
        return keep_null or value is not None

    if isinstance(obj, dict):
        return {to_plain(k, keep_null): to_plain(v, keep_null) for k, v in obj.items() if keep(v)}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    if hasattr(obj, "__iter__"):
        return [to_plain(v, keep_null) for v in obj if keep(v)]
    if hasattr(obj, '__dict__'):
        return {k: to_plain(v, keep_null) for k, v in vars(obj).items()
                if not k.startswith('_') and not callable(v) and keep(v)}
    return obj


def extract_to_model(data: Any, obj: Type[SerializableType], eraise: bool = False,
                     backup_obj: Optional[Type[SerializableType]] = None) \
        -> Union[None, SerializableType, List[SerializableType]]:
    """
    Build Serializable objects from JSON-like data, tries backup_obj if supplied
    :param data: incoming data, list or dicts
    :param obj: child of Serializable class
    :param eraise: raise RuntimeError if incorrect data supplied
    :param backup_obj: trying to build data into backup_obj if not successfull on obj
    :return: Serializable class instance if possible
    """
    if isinstance(data, obj):
        return data
    if isinstance(data, (list, tuple, set)):
        return [extract_to_model(x, obj, eraise, backup_obj) for x in data]
    if not isinstance(data, dict):
        return None

    built = obj.from_json(data)
    if not isinstance(built, Exception):
        return built
    if backup_obj is not None:
        return extract_to_model(data, backup_obj, True)
    if eraise:
        raise built
    warnings.warn(f"Unable to build {obj.__name__} from '{data}', skipping")
    return None


class Serializable:
    __model__ = True

    @staticmethod
    def to_enum(source: Union[int, str, Enum, None], obj: EnumMeta) -> Optional[Enum]:
        """
        Resolves enum member by value first and by name second
        """
        if source is None or isinstance(source, obj):
            return source
        for member in obj:  # type: ignore
            if source == member.value or source == member.name:
                return member
        raise ValueError(f"Unable to extract {obj.__name__} from {source!r}")

    def to_json(self, keep_null: bool = False) -> Dict[str, Any]:
        """
        Method to convert model to JSON
        :param keep_null: True to keep "field": null in generated JSON, default is False (no key)
        :return: JSON-like dictionary
        """
        return to_plain(self, keep_null)

    def __repr__(self) -> str:
        return json.dumps(self.to_json(), option=json.OPT_SORT_KEYS | json.OPT_SERIALIZE_NUMPY).decode()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Serializable):
            raise ValueError("Impossible to directly compare non-models objects")
        diff = DeepDiff(self.to_json(keep_null=True), other.to_json(keep_null=True),
                        ignore_order=True, significant_digits=EQ_DIGITS)
        return not diff

    @classmethod
    def from_json(cls: Type[SerializableType],
                  obj: Union[Dict, SerializableType, None]) -> Union[SerializableType, Exception]:
        """
        Builds model from JSON-like dict, camelCase keys are accepted
        :return: model instance or RuntimeError describing why it could not be built
        """
        if isinstance(obj, cls):
            return obj
        if obj is not None and not isinstance(obj, dict):
            return RuntimeError(f"could not get {cls.__name__} from {type(obj)}")
        if obj:
            kwargs = {make_key(k): v for k, v in obj.items()}
        else:
            kwargs = {k: None for k in signature(cls.__init__).parameters if k not in ('self', 'args', 'kwargs')}
        try:
            return cls(**kwargs)  # type: ignore
        except (TypeError, ValueError) as e:
            return RuntimeError(f"could not get {cls.__name__} from {obj}: {e}")
