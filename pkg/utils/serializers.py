# utils/serializers.py
"""File I/O for diagrams, sequences and reports; every error names its location."""
import csv
import io
import json
import os

from utils.exceptions import NotFoundError, ValidationError


def load_json(path):
    """Parse a JSON file; syntax errors carry ``path:line:column``."""
    if not os.path.isfile(path):
        raise NotFoundError(f"File '{path}' does not exist.", resource_type='file', resource_id=str(path))
    with open(path, encoding='utf-8') as handle:
        text = handle.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"Invalid JSON: {e.msg}.", field=f'{path}:{e.lineno}:{e.colno}')


def load_model(path, model):
    """``model.from_dict`` on the file contents, locations given as ``path:$.json.path``."""
    return model.from_dict(load_json(path), location=f'{path}:$')


def dump_json(data, path=None):
    text = json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + '\n'
    if path:
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
    return text


def dump_csv(header, rows, path=None):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    text = buffer.getvalue()
    if path:
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
    return text


def read_growth_table(path):
    """CSV with columns ``n,g``; returns {n: g_n}."""
    if not os.path.isfile(path):
        raise NotFoundError(f"File '{path}' does not exist.", resource_type='file', resource_id=str(path))
    table = {}
    with open(path, encoding='utf-8', newline='') as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or not {'n', 'g'} <= set(reader.fieldnames):
            raise ValidationError("Growth table needs the columns 'n' and 'g'.", field=f'{path}:1')
        for row in reader:
            try:
                n, g = int(row['n']), float(row['g'])
            except (TypeError, ValueError):
                raise ValidationError(f"Row {row} is not numeric.", field=f'{path}:{reader.line_num}')
            if g <= 0:
                raise ValidationError(f"Growth values must be positive, got {g}.",
                                      field=f'{path}:{reader.line_num}')
            table[n] = g
    return table
