# utils/helper.py
import os
import datetime
from dotenv import load_dotenv

# Load env
load_dotenv()

DEFAULT_RESULTS_DIR = "results"


def log_progress(message):
    """Simple timestamped logger for backend progress tracking."""
    ts = datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    line = f"[{ts}] {message}"
    print(line)

    log_file = os.getenv("QSNN_LOG_FILE")
    if log_file:
        parent = os.path.dirname(log_file)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(log_file, "a") as f:
            f.write(line + "\n")


def get_results_dir():
    return os.getenv("QSNN_RESULTS_DIR") or DEFAULT_RESULTS_DIR


def get_worker_count():
    raw = os.getenv("QSNN_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        log_progress(f"Warning: QSNN_WORKERS={raw!r} is not an integer, using 1.")
        return 1
