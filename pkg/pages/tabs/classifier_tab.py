# pages/tabs/classifier_tab.py

from dash import html, dash_table, Input, Output
import dash_bootstrap_components as dbc
from utils.results_loader import load_run, table_payload
from utils.errors import QSNNError

# -----------------------------------------------------------------------------
# Layout for Classifier Tab (werner_classify runs)
# -----------------------------------------------------------------------------
classifier_tab_layout = html.Div(className="py-4", children=[
    dbc.Alert(id="classifier-notify", color="info", is_open=False),
    html.H5("Confusion Matrix"),
    dash_table.DataTable(id="confusion-table", style_table={"overflowX": "auto"}),
    html.Br(),
    html.H5("Per-State Report"),
    dash_table.DataTable(id="per-state-table", page_size=49, sort_action="native",
                         style_table={"overflowX": "auto"})
])

def classifier_rows(run_dir):
    tables = load_run(run_dir)["tables"]
    if "confusion" not in tables:
        return None
    confusion = table_payload(tables["confusion"])
    per_state = table_payload(tables.get("per_state"))
    return confusion, per_state

# -----------------------------------------------------------------------------
# Callbacks
# -----------------------------------------------------------------------------
def register_callbacks(app):
    @app.callback(
        Output("confusion-table", "data"),
        Output("confusion-table", "columns"),
        Output("per-state-table", "data"),
        Output("per-state-table", "columns"),
        Output("classifier-notify", "children"),
        Output("classifier-notify", "is_open"),
        Input("run_option", "value")
    )
    def update_classifier(run_dir):
        if not run_dir:
            return [], [], [], [], "", False
        try:
            rows = classifier_rows(run_dir)
        except QSNNError as e:
            return [], [], [], [], str(e), True
        if rows is None:
            return [], [], [], [], "This run has no classifier evaluation.", True
        (conf_data, conf_cols), (state_data, state_cols) = rows
        return conf_data, conf_cols, state_data, state_cols, "", False
