import sys


def serve(answer, stdin=None, stdout=None) -> None:
    """Run the request/reply loop with ``answer(list_of_ints) -> int``."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            radicands = [int(tok) for tok in line.split()]
            reply = str(int(answer(radicands)))
        except Exception as exc:  # reported to the caller, never fatal
            reply = "ERR " + " ".join(str(exc).split())
        stdout.write(reply + "\n")
        stdout.flush()
