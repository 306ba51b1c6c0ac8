# pages/tabs/parameters_tab.py

from dash import html, dcc, dash_table, Input, Output
import dash_bootstrap_components as dbc
from utils.results_loader import load_run, table_payload
from utils.errors import QSNNError

parameters_tab_layout = html.Div(className="py-4", children=[
    dbc.Row([
        dbc.Col([
            html.Label("Select Sub-run"),
            dcc.Dropdown(id="parameters-run-dropdown", placeholder="Default: first sub-run")
        ], width=4)
    ]),
    html.Br(),
    dbc.Alert(id="parameters-notify", color="danger", is_open=False),
    dash_table.DataTable(id="parameters-table", page_size=64, style_table={"overflowX": "auto"})
])

def parameter_rows(run_dir, sub_run=None):
    """Initial and final values of every h_k and gamma_k for one sub-run."""
    params = load_run(run_dir)["tables"].get("parameters")
    if params is None or params.empty:
        return [], [], []
    runs = sorted(params["run"].unique().tolist())
    chosen = sub_run if sub_run in runs else runs[0]
    data, columns = table_payload(params[params["run"] == chosen])
    return data, columns, [{"label": f"run {r}", "value": r} for r in runs]

def register_callbacks(app):
    @app.callback(
        Output("parameters-table", "data"),
        Output("parameters-table", "columns"),
        Output("parameters-run-dropdown", "options"),
        Output("parameters-notify", "children"),
        Output("parameters-notify", "is_open"),
        Input("run_option", "value"),
        Input("parameters-run-dropdown", "value")
    )
    def update_parameters(run_dir, sub_run):
        if not run_dir:
            return [], [], [], "", False
        try:
            data, columns, options = parameter_rows(run_dir, sub_run)
        except QSNNError as e:
            return [], [], [], str(e), True
        return data, columns, options, "", False
