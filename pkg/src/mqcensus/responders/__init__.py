"""Stand-alone class-number responders speaking the line protocol.

A responder reads one request per line on stdin (space-separated signed
radicands of a primitive list) and writes one reply per line on stdout:
the class number in decimal, or ``ERR <message>``.
"""
