"""Operation-stream protocol for the dynamic LIS structure.

One operation per line, applied to a single DynLisInstance:

    I <pos> <value>    insert value at 1-based position   -> ACK:I:<key>
    D <key>            delete by key                       -> ACK:D:<key>
    S <key> <value>    substitute the value under key      -> ACK:S:<key>
    Q                  estimate                            -> RSP:Q:<estimate>
    X                  extract                             -> RSP:X:<json>
    C                  op counters                         -> RSP:C:<json>

Failures answer ERR:<op>:<message> and leave the stream running. Blank
lines and lines starting with '#' produce no response. Keys count 1, 2, 3,
... in insertion order, so a stream file can name the elements it made.
"""

import json

from dynamic_lis import DynLisInstance


class ReplayProtocol:
    """Processes operation lines against one instance and returns responses."""

    def __init__(self, instance=None):
        self._inst = instance or DynLisInstance()
        self._handled = 0
        self._errors = 0

    @property
    def instance(self):
        return self._inst

    def stats(self):
        return {"handled": self._handled, "errors": self._errors,
                "size": self._inst.size()}

    def handle_line(self, line):
        """Process one line. Returns the response string, or None for blanks."""
        line = line.strip()
        if not line or line.startswith("#"):
            return None
        op, *args = line.split()
        op = op.upper()
        rsp = self._dispatch(op, args)
        self._handled += 1
        if rsp.startswith("ERR:"):
            self._errors += 1
        return rsp

    # --- Dispatch ---

    def _dispatch(self, op, args):
        handlers = {
            "I": self._op_insert,
            "D": self._op_delete,
            "S": self._op_substitute,
            "Q": self._op_query,
            "X": self._op_extract,
            "C": self._op_counters,
        }
        handler = handlers.get(op)
        if handler is None:
            return f"ERR:{op}:unknown operation"
        try:
            return handler(args)
        except Exception as e:
            return f"ERR:{op}:{e}"

    # --- Operation handlers ---

    def _op_insert(self, args):
        pos, value = _ints(args, 2)
        key = self._inst.insert(pos, value)
        return f"ACK:I:{key}"

    def _op_delete(self, args):
        (key,) = _ints(args, 1)
        self._inst.delete(key)
        return f"ACK:D:{key}"

    def _op_substitute(self, args):
        key, value = _ints(args, 2)
        self._inst.substitute(key, value)
        return f"ACK:S:{key}"

    def _op_query(self, args):
        _ints(args, 0)
        return f"RSP:Q:{self._inst.estimate_lis()}"

    def _op_extract(self, args):
        _ints(args, 0)
        keys = self._inst.extract_solution()
        doc = {
            "keys": keys,
            "positions": [self._inst.position_of(k) for k in keys],
            "values": [self._inst.value_of(k) for k in keys],
        }
        return "RSP:X:" + json.dumps(doc, separators=(",", ":"))

    def _op_counters(self, args):
        _ints(args, 0)
        return "RSP:C:" + json.dumps(self._inst.op_counters().to_dict(),
                                     separators=(",", ":"))


def _ints(args, count):
    if len(args) != count:
        raise ValueError(f"expected {count} arguments, got {len(args)}")
    try:
        return [int(a) for a in args]
    except ValueError:
        raise ValueError(f"arguments must be integers: {' '.join(args)}") from None


def replay(lines, instance=None):
    """Yield the response for every non-blank line of a stream."""
    protocol = ReplayProtocol(instance)
    for line in lines:
        rsp = protocol.handle_line(line)
        if rsp is not None:
            yield rsp
