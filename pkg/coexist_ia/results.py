""" tabular run results and their csv / json encodings """
import csv
import dataclasses
import json
import math
import typing

ROW_SEPARATOR = ';'


@dataclasses.dataclass(frozen=True)
class RunResult:
    columns: typing.Tuple[str, ...]
    rows: typing.List[typing.Dict[str, typing.Any]]
    meta: typing.Dict[str, typing.Any]

    def column(self, name: str) -> list:
        return [row[name] for row in self.rows]


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (list, tuple)):
        return [_json_value(item) for item in value]
    return value


def _csv_cell(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ROW_SEPARATOR.join(_csv_cell(item) for item in value)
    return str(value)


def write_csv(result: RunResult, handle: typing.TextIO):
    """metadata as leading ``# key: json`` lines, then a header and one line per row"""
    for key in sorted(result.meta):
        handle.write('# %s: %s\n' % (key, json.dumps(_json_value(result.meta[key]), sort_keys=True)))
    writer = csv.writer(handle, lineterminator='\n')
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_csv_cell(row.get(column)) for column in result.columns])


def write_json(result: RunResult, handle: typing.TextIO):
    document = {
        'meta': result.meta,
        'rows': [{column: _json_value(row.get(column)) for column in result.columns} for row in result.rows],
    }
    json.dump(document, handle, sort_keys=True, indent=2, allow_nan=False)
    handle.write('\n')


WRITERS = {
    'csv': write_csv,
    'json': write_json,
}


def write(result: RunResult, handle: typing.TextIO, fmt: str = 'csv'):
    try:
        writer = WRITERS[fmt]
    except KeyError:
        raise ValueError('unknown output format %r' % fmt) from None
    writer(result, handle)
