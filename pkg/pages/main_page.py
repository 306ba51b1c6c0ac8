# pages/main_page.py

from dash import html, dcc, Input, Output
import dash_bootstrap_components as dbc
from pages.tabs.summary_tab import summary_tab_layout
from pages.tabs.curves_tab import curves_tab_layout
from pages.tabs.parameters_tab import parameters_tab_layout
from pages.tabs.classifier_tab import classifier_tab_layout
from utils.results_loader import list_runs, load_run, run_overview
from utils.helper import get_results_dir
from utils.errors import QSNNError

def main_layout():
    return dbc.Container([
        html.Br(),
        dbc.Row([
            dbc.Col([
                html.H5("Select Run"),
                dcc.Dropdown(id="run_option", options=list_runs(), placeholder="Select a results directory"),
                html.P(f"Runs are read from {get_results_dir()}.", className="text-muted small mt-2")
            ], width=6),
            dbc.Col(html.Div(id="run-overview"), width=6),
        ]),
        html.Hr(),
        dcc.Tabs(id="run-tabs", value="summary_tab", children=[
            dcc.Tab(label="Summary", value="summary_tab", children=summary_tab_layout),
            dcc.Tab(label="Iteration Curves", value="curves_tab", children=curves_tab_layout),
            dcc.Tab(label="Parameters", value="parameters_tab", children=parameters_tab_layout),
            dcc.Tab(label="Classifier", value="classifier_tab", children=classifier_tab_layout),
        ])
    ], fluid=True)

def register_callbacks(app):
    @app.callback(
        Output("run-overview", "children"),
        Input("run_option", "value")
    )
    def update_overview(run_dir):
        if not run_dir:
            return ""
        try:
            rows = run_overview(load_run(run_dir))
        except QSNNError as e:
            return dbc.Alert(str(e), color="danger")
        return dbc.Table([html.Tbody([html.Tr([html.Th(k), html.Td(str(v))]) for k, v in rows])],
                         bordered=True, size="sm")
