# pages/tabs/summary_tab.py

from dash import html, dcc, dash_table, Input, Output
import dash_bootstrap_components as dbc
from utils.results_loader import load_run, table_payload
from utils.errors import QSNNError

# -----------------------------------------------------------------------------
# Layout for Summary Tab
# -----------------------------------------------------------------------------
summary_tab_layout = html.Div(className="py-4", children=[
    dbc.Alert(id="summary-notify", color="warning", is_open=False),
    dcc.Loading(type="circle", children=[
        dash_table.DataTable(id="summary-table", page_size=25, sort_action="native",
                             filter_action="native", style_table={"overflowX": "auto"})
    ])
])

def summary_rows(run_dir):
    """Summary table payload plus a warning when a sub-run beats the Helstrom bound."""
    summary = load_run(run_dir)["tables"].get("summary")
    data, columns = table_payload(summary)
    message = ""
    if summary is not None and "gap" in summary:
        beaten = summary[summary["gap"] < -1e-6]
        if len(beaten):
            message = f"{len(beaten)} sub-run(s) exceed the Helstrom bound: runs {beaten['run'].tolist()}"
    return data, columns, message

# -----------------------------------------------------------------------------
# Callbacks
# -----------------------------------------------------------------------------
def register_callbacks(app):
    @app.callback(
        Output("summary-table", "data"),
        Output("summary-table", "columns"),
        Output("summary-notify", "children"),
        Output("summary-notify", "is_open"),
        Input("run_option", "value")
    )
    def update_summary(run_dir):
        if not run_dir:
            return [], [], "", False
        try:
            data, columns, message = summary_rows(run_dir)
        except QSNNError as e:
            return [], [], str(e), True
        return data, columns, message, bool(message)
